//! Binary greymap (PGM `P5`) reading and writing.
//!
//! Samples wider than 8 bits are big-endian, as the format requires. Rows are
//! stored in grid order: the first image row is grid row `j = 0`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Greymap {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Greymap {
    pub fn new(width: usize, height: usize, maxval: u16, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("greymap", "zero dimension"));
        }
        if maxval == 0 {
            return Err(Error::invalid("greymap", "maxval must be positive"));
        }
        if samples.len() != width * height {
            return Err(Error::invalid("greymap", "sample count does not match dimensions"));
        }
        if let Some(s) = samples.iter().find(|&&s| s > maxval) {
            return Err(Error::invalid("greymap", format!("sample {s} exceeds maxval {maxval}")));
        }
        Ok(Self {
            width,
            height,
            maxval,
            samples,
        })
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedPgm(msg.into())
}

/// Reads one header token, skipping whitespace and `#` comments. Consumes the
/// single whitespace byte that terminates the token.
fn token<R: Read>(r: &mut R) -> Result<String> {
    let mut byte = [0u8; 1];
    let mut tok = String::new();
    loop {
        if r.read(&mut byte)? == 0 {
            return Err(malformed("truncated header"));
        }
        match byte[0] {
            b'#' if tok.is_empty() => loop {
                if r.read(&mut byte)? == 0 {
                    return Err(malformed("truncated header"));
                }
                if byte[0] == b'\n' || byte[0] == b'\r' {
                    break;
                }
            },
            b if b.is_ascii_whitespace() => {
                if !tok.is_empty() {
                    return Ok(tok);
                }
            }
            b => {
                tok.push(b as char);
                if tok.len() > 20 {
                    return Err(malformed("header token too long"));
                }
            }
        }
    }
}

fn number<R: Read>(r: &mut R, what: &str) -> Result<usize> {
    let t = token(r)?;
    t.parse()
        .map_err(|_| malformed(format!("bad {what} {t:?}")))
}

pub fn read<R: Read>(mut r: R) -> Result<Greymap> {
    if token(&mut r)? != "P5" {
        return Err(malformed("not a binary greymap (P5)"));
    }
    let width = number(&mut r, "width")?;
    let height = number(&mut r, "height")?;
    let maxval = number(&mut r, "maxval")?;
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(format!("maxval {maxval} out of range")));
    }
    let wide = maxval > 255;
    let n = width
        .checked_mul(height)
        .ok_or_else(|| malformed("dimensions overflow"))?;
    let mut raw = vec![0u8; if wide { 2 * n } else { n }];
    r.read_exact(&mut raw)
        .map_err(|_| malformed("truncated sample data"))?;
    let samples: Vec<u16> = if wide {
        raw.chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]))
            .collect()
    } else {
        raw.iter().map(|&b| b as u16).collect()
    };
    Greymap::new(width, height, maxval as u16, samples).map_err(|e| malformed(e.to_string()))
}

pub fn write<W: Write>(img: &Greymap, mut w: W) -> Result<()> {
    write!(w, "P5\n{} {}\n{}\n", img.width, img.height, img.maxval)?;
    let mut buf = Vec::with_capacity(img.samples.len() * 2);
    if img.maxval > 255 {
        for s in &img.samples {
            buf.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        buf.extend(img.samples.iter().map(|&s| s as u8));
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Greymap> {
    read(BufReader::new(File::open(path)?))
}

pub fn save(img: &Greymap, path: impl AsRef<Path>) -> Result<()> {
    write(img, BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sixteen_bit_is_big_endian() {
        let img = Greymap::new(2, 1, 65535, vec![0x0102, 0xfffe]).unwrap();
        let mut bytes = Vec::new();
        write(&img, &mut bytes).unwrap();
        assert_eq!(bytes, b"P5\n2 1\n65535\n\x01\x02\xff\xfe");
    }

    #[test]
    fn header_comments_and_eight_bit() {
        let data = b"P5 # comment\n# another\n3 1 # dims\n255\n\x00\x7f\xff";
        let img = read(&data[..]).unwrap();
        assert_eq!(img.samples, vec![0, 127, 255]);
        assert_eq!(img.maxval, 255);
    }

    #[test]
    fn malformed_inputs() {
        let cases: [&[u8]; 6] = [
            b"P2\n1 1\n255\n0",
            b"P5\n2 2\n65535\n\x00\x01",
            b"P5\n2",
            b"P5\nx 2\n255\n",
            b"P5\n1 1\n70000\n\x00\x00",
            b"P5\n1 1\n200\n\xff",
        ];
        for c in cases {
            assert!(matches!(read(c), Err(Error::MalformedPgm(_))), "{:?}", String::from_utf8_lossy(c));
        }
    }

    proptest! {
        #[test]
        fn round_trip(w in 1usize..6, h in 1usize..6, maxval in prop_oneof![Just(255u16), Just(1000u16), Just(65535u16)], seed in 0u32..1000) {
            let samples = (0..w * h).map(|k| ((k as u32 * 7919 + seed) % (maxval as u32 + 1)) as u16).collect();
            let img = Greymap::new(w, h, maxval, samples).unwrap();
            let mut bytes = Vec::new();
            write(&img, &mut bytes).unwrap();
            prop_assert_eq!(read(&bytes[..]).unwrap(), img);
        }
    }
}
