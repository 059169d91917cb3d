//! Length-prefixed big-endian byte codec shared by the canonical encodings and
//! the card persistence blob, plus serde helpers for hex-encoded byte fields.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unexpected end of input at offset {0}")]
    Truncated(usize),
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("invalid utf-8 in string field")]
    InvalidUtf8,
    #[error("invalid value for {0}")]
    InvalidValue(&'static str),
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
}

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_header(magic: &[u8; 4], version: u8) -> Self {
        let mut w = Self::new();
        w.buf.extend_from_slice(magic);
        w.buf.push(version);
        w
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn bool(&mut self, v: bool) -> &mut Self {
        self.u8(v as u8)
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    /// 4-byte big-endian length, then the raw bytes.
    pub fn bytes(&mut self, v: &[u8]) -> &mut Self {
        let len = u32::try_from(v.len()).expect("field longer than 4 GiB");
        self.u32(len);
        self.buf.extend_from_slice(v);
        self
    }

    pub fn str(&mut self, v: &str) -> &mut Self {
        self.bytes(v.as_bytes())
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    /// Consumes and checks a 4-byte magic plus version byte.
    pub fn header(buf: &'a [u8], magic: &[u8; 4], version: u8) -> Result<Self, DecodeError> {
        let mut r = Self::new(buf);
        if r.take(4)? != magic {
            return Err(DecodeError::BadMagic);
        }
        let v = r.u8()?;
        if v != version {
            return Err(DecodeError::UnsupportedVersion(v));
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self.pos.checked_add(n).ok_or(DecodeError::Truncated(self.pos))?;
        let s = self.buf.get(self.pos..end).ok_or(DecodeError::Truncated(self.pos))?;
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    pub fn bool(&mut self) -> Result<bool, DecodeError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(DecodeError::InvalidValue("boolean")),
        }
    }

    pub fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64, DecodeError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn f64(&mut self) -> Result<f64, DecodeError> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    pub fn string(&mut self) -> Result<String, DecodeError> {
        let b = self.bytes()?;
        String::from_utf8(b.to_vec()).map_err(|_| DecodeError::InvalidUtf8)
    }

    pub fn finish(self) -> Result<(), DecodeError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            n => Err(DecodeError::TrailingBytes(n)),
        }
    }
}

/// `#[serde(with = "hex_bytes")]` for `Vec<u8>` fields.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "hex_array")]` for fixed-size byte arrays.
pub mod hex_array {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[u8; N], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[u8; N], D::Error> {
        let s = String::deserialize(d)?;
        let v = hex::decode(s).map_err(serde::de::Error::custom)?;
        let n = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::custom(format!("expected {N} bytes, got {n}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writer_layout() {
        let mut w = Writer::with_header(b"TEST", 1);
        w.str("ab").u64(2).bool(true);
        assert_eq!(
            w.finish(),
            [b'T', b'E', b'S', b'T', 1, 0, 0, 0, 2, b'a', b'b', 0, 0, 0, 0, 0, 0, 0, 2, 1]
        );
    }

    #[test]
    fn reader_rejects_truncation_and_trailing() {
        let mut w = Writer::with_header(b"TEST", 1);
        w.str("hello");
        let buf = w.finish();
        let mut r = Reader::header(&buf[..buf.len() - 1], b"TEST", 1).unwrap();
        assert!(matches!(r.string(), Err(DecodeError::Truncated(_))));

        let mut long = buf.clone();
        long.push(0);
        let mut r = Reader::header(&long, b"TEST", 1).unwrap();
        r.string().unwrap();
        assert_eq!(r.finish(), Err(DecodeError::TrailingBytes(1)));

        assert_eq!(Reader::header(&buf, b"NOPE", 1).unwrap_err(), DecodeError::BadMagic);
        assert_eq!(
            Reader::header(&buf, b"TEST", 2).unwrap_err(),
            DecodeError::UnsupportedVersion(1)
        );
    }

    #[test]
    fn huge_length_prefix_is_truncation_not_panic() {
        let buf = [0xff, 0xff, 0xff, 0xff, 1];
        let mut r = Reader::new(&buf);
        assert!(matches!(r.bytes(), Err(DecodeError::Truncated(_))));
    }
}
