// AES with MixColumns and AddRoundKey run as bulk row operations, one
// full row of blocks (the batch size the host profile is calibrated for).

use cidan::dram::SimConfig;
use cidan::report::AesConfig;
use cidan::workloads::{aes_encrypt, encrypt_block_reference, Block};
use cidan::BackendKind;
use rand::{Rng, SeedableRng};

pub fn run_example() -> anyhow::Result<()> {
    let cfg = SimConfig::default();
    let host = AesConfig::default().host;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let key: [u8; 16] = rng.gen();
    let blocks: Vec<Block> = (0..8192).map(|_| rng.gen()).collect();
    let mut base = None;
    for backend in [BackendKind::Cidan, BackendKind::Redram] {
        let r = aes_encrypt(&blocks, &key, backend, &cfg, &host)?;
        for (b, c) in blocks.iter().zip(&r.ciphertexts) {
            anyhow::ensure!(*c == encrypt_block_reference(b, &key)?, "ciphertext mismatch on {backend}");
        }
        let cidan = *base.get_or_insert(r.total_ns);
        println!(
            "{:<7} pim {:>12.1} ns  host {:>12.1} ns  total x{:.3}  offloaded share {:.1}%  ops {:?}",
            backend.label(),
            r.pim.stats.latency_ns,
            r.host_ns,
            r.total_ns / cidan,
            100.0 * r.offloaded_share,
            r.pim.op_mix
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
