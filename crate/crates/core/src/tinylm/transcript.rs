//! Transcript container format.
//!
//! Layout: versioned magic, a JSON header (config + corpus root), then one
//! binary section per checkpoint with the sealed weights, the data indices
//! as a varint list, and the auxiliary state.

use super::{AuxState, Checkpoint, ModelConfig, ProofTranscript};
use crate::error::{Error, Result};
use crate::hash::Digest;
use crate::seal::SealedBlob;
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"DTPOL001";

#[derive(Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    corpus_root: Digest,
    checkpoint_count: u32,
}

pub fn write_transcript(path: &Path, transcript: &ProofTranscript) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };

    w.write_all(MAGIC).map_err(io_err)?;
    let header = serde_json::to_vec(&Header {
        config: transcript.config.clone(),
        corpus_root: transcript.corpus_root,
        checkpoint_count: transcript.checkpoints.len() as u32,
    })?;
    w.write_all(&(header.len() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&header).map_err(io_err)?;

    for cp in &transcript.checkpoints {
        w.write_all(&cp.step.to_le_bytes()).map_err(io_err)?;
        w.write_all(&cp.weights_hash.0).map_err(io_err)?;
        write_bytes(&mut w, cp.sealed_weights.scheme.as_bytes()).map_err(io_err)?;
        write_bytes(&mut w, &cp.sealed_weights.payload).map_err(io_err)?;
        w.write_all(&cp.sealed_weights.auth.0).map_err(io_err)?;
        w.write_all(&(cp.data_indices.len() as u64).to_le_bytes()).map_err(io_err)?;
        for &ix in &cp.data_indices {
            write_varint(&mut w, ix as u64).map_err(io_err)?;
        }
        w.write_all(&cp.aux.rng_state).map_err(io_err)?;
        w.write_all(&cp.aux.learning_rate.to_le_bytes()).map_err(io_err)?;
        w.write_all(&cp.aux.optimizer_state_hash.0).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_transcript(path: &Path) -> Result<ProofTranscript> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut r = BufReader::new(file);
    let bad = |msg: &str| Error::MalformedTranscript(msg.to_string());

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(|_| bad("truncated magic"))?;
    if &magic != MAGIC {
        return Err(Error::MalformedTranscript(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(MAGIC)
        )));
    }

    let header_len = read_u64(&mut r).map_err(|_| bad("truncated header length"))? as usize;
    if header_len > 1 << 20 {
        return Err(bad("header implausibly large"));
    }
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes).map_err(|_| bad("truncated header"))?;
    let header: Header = serde_json::from_slice(&header_bytes)?;

    let mut checkpoints = Vec::with_capacity(header.checkpoint_count as usize);
    for _ in 0..header.checkpoint_count {
        let step = read_u64(&mut r).map_err(|_| bad("truncated checkpoint step"))?;
        let weights_hash = read_digest(&mut r).map_err(|_| bad("truncated weights hash"))?;
        let scheme_bytes = read_bytes(&mut r).map_err(|_| bad("truncated seal scheme"))?;
        let scheme = String::from_utf8(scheme_bytes).map_err(|_| bad("seal scheme not utf-8"))?;
        let payload = read_bytes(&mut r).map_err(|_| bad("truncated seal payload"))?;
        let auth = read_digest(&mut r).map_err(|_| bad("truncated seal auth"))?;
        let count = read_u64(&mut r).map_err(|_| bad("truncated index count"))? as usize;
        let mut data_indices = Vec::with_capacity(count);
        for _ in 0..count {
            let v = read_varint(&mut r).map_err(|_| bad("truncated index varint"))?;
            data_indices.push(
                u32::try_from(v).map_err(|_| bad("data index exceeds u32 range"))?,
            );
        }
        let mut rng_state = [0u8; 40];
        r.read_exact(&mut rng_state).map_err(|_| bad("truncated rng state"))?;
        let mut lr = [0u8; 4];
        r.read_exact(&mut lr).map_err(|_| bad("truncated learning rate"))?;
        let optimizer_state_hash = read_digest(&mut r).map_err(|_| bad("truncated optimizer hash"))?;
        checkpoints.push(Checkpoint {
            step,
            sealed_weights: SealedBlob {
                scheme,
                payload,
                auth,
            },
            weights_hash,
            data_indices,
            aux: AuxState {
                rng_state,
                learning_rate: f32::from_le_bytes(lr),
                optimizer_state_hash,
            },
        });
    }

    Ok(ProofTranscript {
        config: header.config,
        corpus_root: header.corpus_root,
        checkpoints,
    })
}

fn write_bytes<W: Write>(w: &mut W, b: &[u8]) -> std::io::Result<()> {
    w.write_all(&(b.len() as u64).to_le_bytes())?;
    w.write_all(b)
}

fn read_bytes<R: Read>(r: &mut R) -> std::io::Result<Vec<u8>> {
    let len = read_u64(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_digest<R: Read>(r: &mut R) -> std::io::Result<Digest> {
    let mut b = [0u8; 32];
    r.read_exact(&mut b)?;
    Ok(Digest(b))
}

/// LEB128 unsigned varint.
fn write_varint<W: Write>(w: &mut W, mut v: u64) -> std::io::Result<()> {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            return w.write_all(&[byte]);
        }
        w.write_all(&[byte | 0x80])?;
    }
}

fn read_varint<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut v = 0u64;
    let mut shift = 0u32;
    loop {
        let mut b = [0u8; 1];
        r.read_exact(&mut b)?;
        v |= ((b[0] & 0x7f) as u64) << shift;
        if b[0] & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
        if shift >= 64 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                "varint too long",
            ));
        }
    }
}
