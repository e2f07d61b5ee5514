//! Binary checkpoint format, version 1. All integers little-endian.
//!
//! ```text
//! magic        8 bytes   b"RANDPOL\0"
//! version      u32
//! header_len   u32
//! header       header_len bytes of JSON (CheckpointHeader)
//! 5 sections   each: u64 count, then count f64 values
//!              actor params, critic params, observation stats,
//!              privileged-observation stats, reward stats
//! digest       32 bytes, sha256 of everything above
//! ```
//!
//! Parameters are in each head's parameter order (row-major weights, then
//! biases, layer by layer; policy `log_std` last). A normalizer section is
//! `[count, mean.., m2..]`. Frozen basis weights are not stored; they are
//! rebuilt from the recorded seeds and checked against the recorded
//! checksums.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"RANDPOL\0";
pub const FORMAT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub algorithm: String,
    pub env: String,
    pub config_hash: String,
    pub config_text: String,
    /// Iterations completed when the checkpoint was taken.
    pub iteration: usize,
    pub lr: f64,
    pub actor_basis_seed: Option<u64>,
    pub critic_basis_seed: Option<u64>,
    /// Input, hidden and output widths of each head.
    pub actor_dims: Vec<usize>,
    pub critic_dims: Vec<usize>,
    /// Distribution of frozen weights and biases.
    pub frozen_distribution: String,
    pub actor_basis_checksum: Option<u64>,
    pub critic_basis_checksum: Option<u64>,
    pub actor_trainable: usize,
    pub critic_trainable: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub actor: Vec<f64>,
    pub critic: Vec<f64>,
    pub obs_stats: Vec<f64>,
    pub privileged_stats: Vec<f64>,
    pub reward_stats: Vec<f64>,
}

impl Checkpoint {
    pub fn encode(&self) -> Result<Vec<u8>> {
        let header = serde_json::to_vec(&self.header).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let header_len = u32::try_from(header.len()).map_err(|_| Error::Checkpoint("header too large".into()))?;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.header.format_version.to_le_bytes());
        out.extend_from_slice(&header_len.to_le_bytes());
        out.extend_from_slice(&header);
        for s in [&self.actor, &self.critic, &self.obs_stats, &self.privileged_stats, &self.reward_stats] {
            out.extend_from_slice(&(s.len() as u64).to_le_bytes());
            for v in s.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint (bad magic)".into()));
        }
        if bytes.len() < MAGIC.len() + 8 + DIGEST_LEN {
            return Err(Error::Checkpoint("checksum mismatch (file truncated)".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Checkpoint("checksum mismatch".into()));
        }
        let mut r = Reader { buf: body, pos: MAGIC.len() };
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "format version {version} not supported (expected {FORMAT_VERSION})"
            )));
        }
        let header_len = r.u32()? as usize;
        let header: CheckpointHeader =
            serde_json::from_slice(r.take(header_len)?).map_err(|e| Error::Checkpoint(format!("header: {e}")))?;
        if header.format_version != version {
            return Err(Error::Checkpoint("header version disagrees with file version".into()));
        }
        let mut sections = Vec::with_capacity(5);
        for _ in 0..5 {
            let n = r.u64()? as usize;
            let raw = r.take(n.checked_mul(8).ok_or_else(|| Error::Checkpoint("section size overflow".into()))?)?;
            sections.push(
                raw.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect::<Vec<_>>(),
            );
        }
        if r.pos != body.len() {
            return Err(Error::Checkpoint("trailing bytes after last section".into()));
        }
        let mut it = sections.into_iter();
        Ok(Self {
            header,
            actor: it.next().unwrap(),
            critic: it.next().unwrap(),
            obs_stats: it.next().unwrap(),
            privileged_stats: it.next().unwrap(),
            reward_stats: it.next().unwrap(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::decode(&std::fs::read(path)?)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Checkpoint("section runs past end of file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
