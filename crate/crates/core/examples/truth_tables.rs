// Every TLPE function against its Boolean definition, plus the adder.

use cidan::threshold::{compile_schedule, run_schedule, TlpeFunc, TlpeState};

pub fn run_example() -> anyhow::Result<()> {
    for func in TlpeFunc::ALL {
        let sched = compile_schedule(func);
        let mut line = format!("{:<5} {} cycle(s):", func.name(), sched.cycle_count());
        for a in [false, true] {
            for b in [false, true] {
                if func == TlpeFunc::AddBit {
                    for cin in [false, true] {
                        let state = TlpeState { l1: cin, l2: false };
                        let (sum, carry, _) = run_schedule(&sched, [a, b, false, false], state);
                        let carry = carry.unwrap_or_default();
                        let want = (a ^ b ^ cin, (a & b) | (cin & (a ^ b)));
                        anyhow::ensure!((sum, carry) == want, "adder wrong at {a} {b} {cin}");
                        line += &format!(" {}{}{}->{}{}", a as u8, b as u8, cin as u8, sum as u8, carry as u8);
                    }
                    continue;
                }
                let (out, _, _) = run_schedule(&sched, [a, b, false, false], TlpeState::default());
                anyhow::ensure!(out == func.apply(a, b), "{} wrong at {a} {b}", func.name());
                line += &format!(" {}{}->{}", a as u8, b as u8, out as u8);
            }
        }
        println!("{line}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
