//! AES encryption with the bulk stages in memory.
//!
//! State layout is bit-sliced: plane `8*i + k` holds bit `k` of state byte
//! `i` for every block, one block per lane. AddRoundKey and MixColumns then
//! become row-wide XOR and AND; SubBytes and ShiftRows run on the host.

use super::host::HostCostModel;
use super::machine::{MachineReport, RowId, RowMachine};
use crate::backends::BackendKind;
use crate::bits::BitRow;
use crate::dram::SimConfig;
use crate::error::{Error, Result};
use crate::threshold::TlpeFunc;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

pub type Block = [u8; 16];

/// Byte operations a plain host implementation spends per state byte on
/// each stage: SubBytes is an index and a lookup, ShiftRows a move,
/// MixColumns 27 operations per column, AddRoundKey a load and an xor.
pub const HOST_OPS_SUB_BYTES: f64 = 2.0;
pub const HOST_OPS_SHIFT_ROWS: f64 = 1.0;
pub const HOST_OPS_MIX_COLUMNS: f64 = 6.75;
pub const HOST_OPS_ADD_ROUND_KEY: f64 = 2.0;

fn xtime(b: u8) -> u8 {
    (b << 1) ^ if b & 0x80 != 0 { 0x1b } else { 0 }
}

fn gmul(mut a: u8, mut b: u8) -> u8 {
    let mut p = 0;
    while b != 0 {
        if b & 1 != 0 {
            p ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    p
}

/// The AES S-box, built from the field inverse and the affine map.
pub fn sbox() -> &'static [u8; 256] {
    static SBOX: OnceLock<[u8; 256]> = OnceLock::new();
    SBOX.get_or_init(|| {
        let mut s = [0u8; 256];
        for (x, out) in s.iter_mut().enumerate() {
            // x^254 is the inverse (and maps 0 to 0)
            let mut inv = 1u8;
            for _ in 0..254 {
                inv = gmul(inv, x as u8);
            }
            let b = inv;
            *out = b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63;
        }
        s
    })
}

pub fn rounds_for(key: &[u8]) -> Result<usize> {
    match key.len() {
        16 => Ok(10),
        24 => Ok(12),
        32 => Ok(14),
        n => Err(Error::Argument(format!("AES keys are 16, 24 or 32 bytes, got {n}"))),
    }
}

/// Round keys 0..=Nr.
pub fn expand_key(key: &[u8]) -> Result<Vec<Block>> {
    let nr = rounds_for(key)?;
    let nk = key.len() / 4;
    let sb = sbox();
    let total = 4 * (nr + 1);
    let mut w: Vec<[u8; 4]> = key.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
    let mut rcon = 1u8;
    for i in nk..total {
        let mut t = w[i - 1];
        if i % nk == 0 {
            t = [sb[t[1] as usize] ^ rcon, sb[t[2] as usize], sb[t[3] as usize], sb[t[0] as usize]];
            rcon = xtime(rcon);
        } else if nk > 6 && i % nk == 4 {
            t = t.map(|b| sb[b as usize]);
        }
        let prev = w[i - nk];
        w.push([prev[0] ^ t[0], prev[1] ^ t[1], prev[2] ^ t[2], prev[3] ^ t[3]]);
    }
    Ok(w.chunks(4)
        .map(|c| {
            let mut b = [0u8; 16];
            for (j, word) in c.iter().enumerate() {
                b[4 * j..4 * j + 4].copy_from_slice(word);
            }
            b
        })
        .collect())
}

fn sub_shift(s: &Block) -> Block {
    let sb = sbox();
    let mut out = [0u8; 16];
    for r in 0..4 {
        for c in 0..4 {
            out[r + 4 * c] = sb[s[r + 4 * ((c + r) % 4)] as usize];
        }
    }
    out
}

/// Byte-oriented encryption of one block on the host.
pub fn encrypt_block_reference(block: &Block, key: &[u8]) -> Result<Block> {
    let rk = expand_key(key)?;
    let nr = rk.len() - 1;
    let mut s = *block;
    let ark = |s: &mut Block, k: &Block| s.iter_mut().zip(k).for_each(|(x, y)| *x ^= y);
    ark(&mut s, &rk[0]);
    for (round, k) in rk.iter().enumerate().skip(1) {
        s = sub_shift(&s);
        if round != nr {
            for c in 0..4 {
                let a: [u8; 4] = [s[4 * c], s[4 * c + 1], s[4 * c + 2], s[4 * c + 3]];
                for r in 0..4 {
                    s[4 * c + r] = xtime(a[r]) ^ xtime(a[(r + 1) % 4]) ^ a[(r + 1) % 4] ^ a[(r + 2) % 4] ^ a[(r + 3) % 4];
                }
            }
        }
        ark(&mut s, k);
    }
    Ok(s)
}

/// Share of a host-only implementation's byte operations that the
/// offloaded stages (MixColumns and AddRoundKey) account for.
pub fn offloaded_share(rounds: usize) -> f64 {
    let nr = rounds as f64;
    let off = (nr - 1.0) * HOST_OPS_MIX_COLUMNS + (nr + 1.0) * HOST_OPS_ADD_ROUND_KEY;
    let kept = nr * (HOST_OPS_SUB_BYTES + HOST_OPS_SHIFT_ROWS);
    off / (off + kept)
}

/// Time for a host-only encryption of `blocks` blocks: every stage priced
/// with the same per-byte operation cost.
pub fn host_only_ns(blocks: usize, rounds: usize, host: &HostCostModel) -> f64 {
    let nr = rounds as f64;
    let ops = nr * (HOST_OPS_SUB_BYTES + HOST_OPS_SHIFT_ROWS)
        + (nr - 1.0) * HOST_OPS_MIX_COLUMNS
        + (nr + 1.0) * HOST_OPS_ADD_ROUND_KEY;
    blocks as f64 * 16.0 * ops * host.ns_per_host_byte
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AesRun {
    pub backend: BackendKind,
    pub rounds: usize,
    pub ciphertexts: Vec<Block>,
    /// The offloaded stages on the back-end.
    pub pim: MachineReport,
    /// SubBytes and ShiftRows on the host.
    pub host_ns: f64,
    /// PIM and host phases alternate, so their times add.
    pub total_ns: f64,
    pub offloaded_share: f64,
}

/// Encrypt `blocks` under one key.
pub fn aes_encrypt(
    blocks: &[Block],
    key: &[u8],
    backend: BackendKind,
    config: &SimConfig,
    host: &HostCostModel,
) -> Result<AesRun> {
    let keys = vec![key; blocks.len()];
    aes_encrypt_lanes(blocks, &keys, backend, config, host)
}

/// Encrypt block `i` under `keys[i]`; keys must share one length. Blocks
/// are processed one row's worth of lanes at a time.
pub fn aes_encrypt_lanes(
    blocks: &[Block],
    keys: &[&[u8]],
    backend: BackendKind,
    config: &SimConfig,
    host: &HostCostModel,
) -> Result<AesRun> {
    if blocks.is_empty() {
        return Err(Error::Argument("need at least one block".into()));
    }
    if keys.len() != blocks.len() {
        return Err(Error::Argument("one key per block".into()));
    }
    host.validate()?;
    let nr = rounds_for(keys[0])?;
    if keys.iter().any(|k| k.len() != keys[0].len()) {
        return Err(Error::Argument("keys must share one length".into()));
    }
    let round_keys = keys.iter().map(|k| expand_key(k)).collect::<Result<Vec<_>>>()?;
    let per_batch = config.geometry.row_bits();
    let mut ciphertexts = Vec::with_capacity(blocks.len());
    let mut pim: Option<MachineReport> = None;
    for (bs, ks) in blocks.chunks(per_batch).zip(round_keys.chunks(per_batch)) {
        let (out, rep) = encrypt_batch(bs, ks, nr, backend, config)?;
        ciphertexts.extend(out);
        pim = Some(match pim {
            None => rep,
            Some(p) => {
                let mut mix = p.op_mix.clone();
                for (k, v) in rep.op_mix {
                    *mix.entry(k).or_default() += v;
                }
                MachineReport {
                    stats: p.stats.then(&rep.stats),
                    op_mix: mix,
                }
            }
        });
    }
    let pim = pim.expect("at least one batch");
    let host_ns = blocks.len() as f64 * 16.0 * nr as f64 * (HOST_OPS_SUB_BYTES + HOST_OPS_SHIFT_ROWS) * host.ns_per_host_byte;
    Ok(AesRun {
        backend,
        rounds: nr,
        ciphertexts,
        total_ns: pim.stats.latency_ns + host_ns,
        pim,
        host_ns,
        offloaded_share: offloaded_share(nr),
    })
}

fn planes_of(lanes: usize, byte: impl Fn(usize, usize) -> u8) -> Vec<BitRow> {
    (0..128)
        .map(|p| BitRow::from_bits((0..lanes).map(|l| byte(l, p / 8) >> (p % 8) & 1 == 1)))
        .collect()
}

fn encrypt_batch(
    blocks: &[Block],
    round_keys: &[Vec<Block>],
    nr: usize,
    backend: BackendKind,
    config: &SimConfig,
) -> Result<(Vec<Block>, MachineReport)> {
    let lanes = blocks.len();
    let mut m = RowMachine::new(backend, config, lanes)?;
    let key_planes = |m: &mut RowMachine, r: usize| -> Result<Vec<RowId>> {
        planes_of(lanes, |l, i| round_keys[l][r][i]).iter().map(|p| m.load(p)).collect()
    };
    // xtime reduction: bit j of 0x1b broadcast to every lane
    let masks: Vec<RowId> = (0..8)
        .map(|j| m.load(&BitRow::splat(lanes, 0x1b >> j & 1 == 1)))
        .collect::<Result<_>>()?;
    let xor = |m: &mut RowMachine, a, b| m.op(TlpeFunc::Xor, a, Some(b));

    let mut state: Vec<RowId> = planes_of(lanes, |l, i| blocks[l][i]).iter().map(|p| m.load(p)).collect::<Result<_>>()?;
    let add_round_key = |m: &mut RowMachine, state: &mut Vec<RowId>, r: usize| -> Result<()> {
        let k = key_planes(m, r)?;
        for (s, k) in state.iter_mut().zip(k) {
            *s = xor(m, *s, k)?;
        }
        Ok(())
    };
    add_round_key(&mut m, &mut state, 0)?;
    for round in 1..=nr {
        // SubBytes and ShiftRows on the host
        let rows: Vec<BitRow> = state.iter().map(|&id| m.get(id)).collect();
        let bytes: Vec<Block> = (0..lanes)
            .map(|l| {
                let mut b = [0u8; 16];
                for (p, row) in rows.iter().enumerate() {
                    if row.get(l) {
                        b[p / 8] |= 1 << (p % 8);
                    }
                }
                sub_shift(&b)
            })
            .collect();
        let inputs = state.clone();
        state = planes_of(lanes, |l, i| bytes[l][i])
            .iter()
            .map(|p| m.host(&inputs, p))
            .collect::<Result<_>>()?;
        if round != nr {
            state = mix_columns(&mut m, &state, &masks)?;
        }
        add_round_key(&mut m, &mut state, round)?;
    }
    let rows: Vec<BitRow> = state.iter().map(|&id| m.get(id)).collect();
    let out = (0..lanes)
        .map(|l| {
            let mut b = [0u8; 16];
            for (p, row) in rows.iter().enumerate() {
                if row.get(l) {
                    b[p / 8] |= 1 << (p % 8);
                }
            }
            b
        })
        .collect();
    Ok((out, m.run()?))
}

/// `b_r = a_r ^ t ^ xtime(a_r ^ a_{r+1})` with `t` the xor of the column.
fn mix_columns(m: &mut RowMachine, s: &[RowId], masks: &[RowId]) -> Result<Vec<RowId>> {
    let plane = |byte: usize, bit: usize| byte * 8 + bit;
    let mut out = s.to_vec();
    for c in 0..4 {
        let a = |r: usize| 4 * c + (r % 4);
        let mut t = Vec::with_capacity(8);
        for k in 0..8 {
            let x = m.op(TlpeFunc::Xor, s[plane(a(0), k)], Some(s[plane(a(1), k)]))?;
            let y = m.op(TlpeFunc::Xor, s[plane(a(2), k)], Some(s[plane(a(3), k)]))?;
            t.push(m.op(TlpeFunc::Xor, x, Some(y))?);
        }
        for r in 0..4 {
            let u: Vec<RowId> = (0..8)
                .map(|k| m.op(TlpeFunc::Xor, s[plane(a(r), k)], Some(s[plane(a(r + 1), k)])))
                .collect::<Result<_>>()?;
            // xtime: shift planes up, fold the top bit back in through the masks
            let mut xt = Vec::with_capacity(8);
            for j in 0..8 {
                let fold = m.op(TlpeFunc::And, u[7], Some(masks[j]))?;
                xt.push(if j == 0 { fold } else { m.op(TlpeFunc::Xor, u[j - 1], Some(fold))? });
            }
            for k in 0..8 {
                let v = m.op(TlpeFunc::Xor, s[plane(a(r), k)], Some(t[k]))?;
                out[plane(a(r), k)] = m.op(TlpeFunc::Xor, v, Some(xt[k]))?;
            }
        }
    }
    Ok(out)
}
