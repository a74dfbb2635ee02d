//! On-disk slice cache: one binary file per internal degree.
//!
//! Layout of `cache/t{t}.slice`, all integers little-endian:
//!
//! ```text
//! magic "LEXT" | u32 version | u32 tag convention | u32 t | u32 s_count
//! then per s in 0..s_count:
//!   u32 class count, then per class:
//!     u32 term count, then per term: u16 word length + u16 indices
//! ```
//!
//! Representatives are stored as admissible monomial lists; tags are the
//! first (lexicographically least) term, so they are not duplicated on disk.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::lambda::{Bidegree, Element, Monomial};

use super::{ExtError, HomologyClass, Slice, TAG_CONVENTION};

const MAGIC: &[u8; 4] = b"LEXT";
const VERSION: u32 = 1;

fn io_err(path: &Path, source: std::io::Error) -> ExtError {
    ExtError::CacheIo {
        path: path.to_path_buf(),
        source,
    }
}

fn slice_path(dir: &Path, t: u32) -> PathBuf {
    dir.join(format!("t{t}.slice"))
}

pub fn save_slice(dir: &Path, slice: &Slice) -> Result<(), ExtError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&TAG_CONVENTION.to_le_bytes());
    buf.extend_from_slice(&slice.t.to_le_bytes());
    buf.extend_from_slice(&(slice.classes.len() as u32).to_le_bytes());
    for classes in &slice.classes {
        buf.extend_from_slice(&(classes.len() as u32).to_le_bytes());
        for class in classes {
            buf.extend_from_slice(&(class.representative.num_terms() as u32).to_le_bytes());
            for term in class.representative.terms() {
                buf.extend_from_slice(&(term.len() as u16).to_le_bytes());
                for &i in term.indices() {
                    buf.extend_from_slice(&i.to_le_bytes());
                }
            }
        }
    }
    let path = slice_path(dir, slice.t);
    let tmp = dir.join(format!(".t{}.slice.tmp", slice.t));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
        f.write_all(&buf).map_err(|e| io_err(&tmp, e))?;
    }
    fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
    Ok(())
}

struct Reader<'a> {
    path: &'a Path,
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ExtError> {
        if self.pos + n > self.data.len() {
            return Err(ExtError::CacheFormat {
                path: self.path.to_path_buf(),
                reason: "truncated file".into(),
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, ExtError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u16(&mut self) -> Result<u16, ExtError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
}

/// Loads a cached slice; `Ok(None)` when the file does not exist.
pub fn load_slice(dir: &Path, t: u32) -> Result<Option<Slice>, ExtError> {
    let path = slice_path(dir, t);
    let mut data = Vec::new();
    match fs::File::open(&path) {
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_err(&path, e)),
        Ok(mut f) => {
            f.read_to_end(&mut data).map_err(|e| io_err(&path, e))?;
        }
    }
    let mut r = Reader {
        path: &path,
        data: &data,
        pos: 0,
    };
    if r.take(4)? != MAGIC {
        return Err(ExtError::CacheFormat {
            path,
            reason: "bad magic".into(),
        });
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(ExtError::CacheFormat {
            path,
            reason: format!("version {version}, expected {VERSION}"),
        });
    }
    let convention = r.u32()?;
    if convention != TAG_CONVENTION {
        return Err(ExtError::CacheFormat {
            path,
            reason: format!("tag convention {convention}, expected {TAG_CONVENTION}"),
        });
    }
    let file_t = r.u32()?;
    if file_t != t {
        return Err(ExtError::CacheFormat {
            path,
            reason: format!("file says t={file_t}, expected {t}"),
        });
    }
    let s_count = r.u32()? as usize;
    let mut classes = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let n = r.u32()? as usize;
        let mut level = Vec::with_capacity(n);
        for _ in 0..n {
            let terms = r.u32()? as usize;
            let mut monos = Vec::with_capacity(terms);
            for _ in 0..terms {
                let len = r.u16()? as usize;
                let mut indices = Vec::with_capacity(len);
                for _ in 0..len {
                    indices.push(r.u16()?);
                }
                monos.push(Monomial::new(indices));
            }
            let bidegree = Bidegree::new(s as u32, t);
            let representative = Element::from_terms(bidegree, monos);
            let tag = representative
                .leading_term()
                .ok_or_else(|| ExtError::CacheFormat {
                    path: path.clone(),
                    reason: "empty representative".into(),
                })?
                .clone();
            level.push(HomologyClass {
                bidegree,
                representative,
                tag,
                name: None,
            });
        }
        classes.push(level);
    }
    Ok(Some(Slice { t, classes }))
}
