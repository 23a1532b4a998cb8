//! Opaque sealed blobs.
//!
//! Sealing here provides integrity and key binding, not confidentiality: the
//! payload is carried as-is and authenticated by a keyed digest. The scheme
//! id travels with the blob so a real cipher can slot in later without
//! changing any call site.

use crate::config::SEALING_SCHEME;
use crate::error::{Error, Result};
use crate::hash::{digest_parts, Digest};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SealedBlob {
    pub scheme: String,
    #[serde(with = "base64_bytes")]
    pub payload: Vec<u8>,
    pub auth: Digest,
}

fn auth_tag(key: &[u8; 32], payload: &[u8]) -> Digest {
    digest_parts(&[SEALING_SCHEME.as_bytes(), key, payload])
}

/// Seal a payload under a key.
pub fn seal(key: &[u8; 32], payload: Vec<u8>) -> SealedBlob {
    let auth = auth_tag(key, &payload);
    SealedBlob {
        scheme: SEALING_SCHEME.to_string(),
        payload,
        auth,
    }
}

/// Unseal, verifying scheme and authentication tag.
pub fn unseal(key: &[u8; 32], blob: &SealedBlob) -> Result<Vec<u8>> {
    if blob.scheme != SEALING_SCHEME {
        return Err(Error::SealIntegrity(format!(
            "unknown sealing scheme {:?}",
            blob.scheme
        )));
    }
    if auth_tag(key, &blob.payload) != blob.auth {
        return Err(Error::SealIntegrity(
            "authentication tag mismatch (wrong key or altered payload)".into(),
        ));
    }
    Ok(blob.payload.clone())
}

mod base64_bytes {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(de)?;
        STANDARD
            .decode(s.as_bytes())
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let key = [9u8; 32];
        let blob = seal(&key, b"weights go here".to_vec());
        assert_eq!(unseal(&key, &blob).unwrap(), b"weights go here");
    }

    #[test]
    fn wrong_key_rejected() {
        let blob = seal(&[1u8; 32], b"data".to_vec());
        assert!(matches!(
            unseal(&[2u8; 32], &blob),
            Err(Error::SealIntegrity(_))
        ));
    }

    #[test]
    fn altered_payload_rejected() {
        let key = [3u8; 32];
        let mut blob = seal(&key, b"data".to_vec());
        blob.payload[0] ^= 1;
        assert!(unseal(&key, &blob).is_err());
    }
}
