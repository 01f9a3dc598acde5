// Decode a bbop instruction, place it on rows, lower and run it.

use cidan::bits::BitRow;
use cidan::isa::{allocate, decode, execute, load_vector, lower, store_vector, Operand};
use cidan::{Backend, BackendKind};
use rand::SeedableRng;

pub fn run_example() -> anyhow::Result<()> {
    let backend = Backend::with_defaults(BackendKind::Cidan);
    let instr = decode("bbop 0x40000, 0x0, 0x20000, xor, 40000", BackendKind::Cidan)?;
    println!("{instr}");
    let placement = allocate(&instr, &backend.config.geometry)?;
    for c in &placement.chunks {
        println!("  group {} : {} = {} ^ {}", c.group, c.dest, c.src1, c.src2.expect("binary op"));
    }
    let mut mem = backend.memory()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let (a, b) = (BitRow::random(40000, &mut rng), BitRow::random(40000, &mut rng));
    store_vector(&mut mem, &placement.rows(Operand::Src1), &a)?;
    store_vector(&mut mem, &placement.rows(Operand::Src2), &b)?;
    let stats = execute(&backend, &mut mem, &lower(&placement))?;
    let got = load_vector(&mem, &placement.rows(Operand::Dest), 40000)?;
    anyhow::ensure!(got == a.xor(&b), "result mismatch");
    println!("{} rows in {:.2} ns, {:?}", placement.chunks.len(), stats.latency_ns, stats.macro_counts);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
