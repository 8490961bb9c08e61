//! The assembled self-index and its on-disk layout.
//!
//! An index directory holds one file per component plus a plain-text
//! `manifest` of `key=value` lines:
//!
//! ```text
//! format=1
//! variant=dr
//! fingerprint=<16 hex digits, xxh3 of the token sequence>
//! component=<TAG> <file> <bytes> <xxh3 of file, 16 hex digits>
//! ```
//!
//! Loading checks every component's length, checksum and leading tag before
//! decoding anything, then checks the decoded token sequence against the
//! fingerprint.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use xxhash_rust::xxh3::xxh3_64;

use crate::codec::FORMAT_VERSION;
use crate::corpus::{Collection, Vocabulary, COLLECTION_TAG, VOCAB_TAG};
use crate::docrep::{
    build_docarray, DocArray, DocFrequency, RepetitionIndex, RepetitionLists, RestrictedIndex, DF_TAG, DOCS_TAG,
    REPS_TAG, RESTRICTED_TAG,
};
use crate::error::{Error, Result};
use crate::suffixindex::{LcpArray, SuffixArray, LCP_TAG, SA_TAG};

pub const MANIFEST_FILE: &str = "manifest";

/// Which document-retrieval structures an index carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Document array tree only.
    D,
    /// Document array tree plus the repetition tree.
    DR,
    /// Single-symbol restricted document and repetition trees.
    D1R1,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::D, Variant::DR, Variant::D1R1];

    pub fn has_repetitions(self) -> bool {
        !matches!(self, Variant::D)
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(Variant::D),
            "dr" => Ok(Variant::DR),
            "d1r1" => Ok(Variant::D1R1),
            other => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::D => "d",
            Variant::DR => "dr",
            Variant::D1R1 => "d1r1",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Index {
    variant: Variant,
    collection: Collection,
    sa: SuffixArray,
    lcp: Option<LcpArray>,
    df: DocFrequency,
    docs: Option<DocArray>,
    reps: Option<RepetitionIndex>,
    restricted: Option<RestrictedIndex>,
}

impl Index {
    pub fn build(collection: Collection, variant: Variant) -> Result<Self> {
        let text = collection.text();
        let num_docs = collection.num_docs();
        let sa = SuffixArray::build(text)?;
        let lcp = LcpArray::build(text, &sa);
        let d = build_docarray(&sa, &collection);
        let lists = RepetitionLists::build(&d, lcp.as_slice());
        let df = DocFrequency::new(lists.h());
        let docs = match variant {
            Variant::D | Variant::DR => Some(DocArray::new(&d, num_docs)?),
            Variant::D1R1 => None,
        };
        let reps = match variant {
            Variant::DR => Some(RepetitionIndex::new(&lists, num_docs)?),
            _ => None,
        };
        let restricted = match variant {
            Variant::D1R1 => Some(RestrictedIndex::build(&d, text, &lists, &df, num_docs)?),
            _ => None,
        };
        Ok(Self { variant, lcp: variant.has_repetitions().then_some(lcp), collection, sa, df, docs, reps, restricted })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn collection(&self) -> &Collection {
        &self.collection
    }

    pub fn suffix_array(&self) -> &SuffixArray {
        &self.sa
    }

    pub fn lcp(&self) -> Option<&LcpArray> {
        self.lcp.as_ref()
    }

    pub fn doc_frequency(&self) -> &DocFrequency {
        &self.df
    }

    pub fn docs(&self) -> Option<&DocArray> {
        self.docs.as_ref()
    }

    pub fn reps(&self) -> Option<&RepetitionIndex> {
        self.reps.as_ref()
    }

    pub fn restricted(&self) -> Option<&RestrictedIndex> {
        self.restricted.as_ref()
    }

    /// Inclusive SA range of `pattern`.
    pub fn locus(&self, pattern: &[u32]) -> Option<(usize, usize)> {
        self.sa.locus(self.collection.text(), pattern)
    }

    /// Number of occurrences of `pattern` in the collection.
    pub fn count(&self, pattern: &[u32]) -> usize {
        self.locus(pattern).map_or(0, |(l, r)| r - l + 1)
    }

    /// Serialized components as `(tag, file name, bytes)`, in manifest order.
    pub fn encode_components(&self) -> Result<Vec<(&'static str, &'static str, Vec<u8>)>> {
        let mut out = Vec::new();
        let mut push = |tag: &'static [u8; 4], file: &'static str, f: &dyn Fn(&mut Vec<u8>) -> Result<()>| {
            let mut buf = Vec::new();
            f(&mut buf)?;
            out.push((std::str::from_utf8(tag).unwrap(), file, buf));
            Ok::<(), Error>(())
        };
        push(VOCAB_TAG, "vocab.bin", &|b| self.collection.vocab().write_to(b))?;
        push(COLLECTION_TAG, "collection.bin", &|b| self.collection.write_to(b))?;
        push(SA_TAG, "sa.bin", &|b| self.sa.write_to(b))?;
        if let Some(lcp) = &self.lcp {
            push(LCP_TAG, "lcp.bin", &|b| lcp.write_to(b))?;
        }
        if let Some(docs) = &self.docs {
            push(DOCS_TAG, "docs.bin", &|b| docs.write_to(b))?;
        }
        push(DF_TAG, "df.bin", &|b| self.df.write_to(b))?;
        if let Some(reps) = &self.reps {
            push(REPS_TAG, "reps.bin", &|b| reps.write_to(b))?;
        }
        if let Some(rx) = &self.restricted {
            push(RESTRICTED_TAG, "restricted.bin", &|b| rx.write_to(b))?;
        }
        Ok(out)
    }

    /// Writes all components and then the manifest into `dir`.
    pub fn save(&self, dir: &Path) -> Result<Manifest> {
        fs::create_dir_all(dir)?;
        let mut manifest = Manifest {
            format: FORMAT_VERSION as u32,
            variant: self.variant,
            fingerprint: self.collection.fingerprint(),
            components: Vec::new(),
        };
        for (tag, file, bytes) in self.encode_components()? {
            fs::write(dir.join(file), &bytes)?;
            manifest.components.push(ComponentEntry {
                tag: tag.to_owned(),
                file: file.to_owned(),
                bytes: bytes.len() as u64,
                checksum: xxh3_64(&bytes),
            });
        }
        fs::write(dir.join(MANIFEST_FILE), manifest.to_string())?;
        Ok(manifest)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = Manifest::read(dir)?;
        let mut blobs = std::collections::HashMap::new();
        for c in &manifest.components {
            let bytes = fs::read(dir.join(&c.file))?;
            if bytes.len() as u64 != c.bytes {
                return Err(Error::Corrupt(format!("{}: expected {} bytes, found {}", c.file, c.bytes, bytes.len())));
            }
            if xxh3_64(&bytes) != c.checksum {
                return Err(Error::Corrupt(format!("{}: checksum mismatch", c.file)));
            }
            if bytes.get(..4) != Some(c.tag.as_bytes()) {
                return Err(Error::Corrupt(format!("{}: tag is not {}", c.file, c.tag)));
            }
            blobs.insert(c.tag.clone(), bytes);
        }
        let take = |tag: &[u8; 4]| -> Result<&[u8]> {
            let tag = std::str::from_utf8(tag).unwrap();
            blobs.get(tag).map(Vec::as_slice).ok_or_else(|| Error::Corrupt(format!("missing component {tag}")))
        };
        let variant = manifest.variant;
        let vocab = Vocabulary::read_from(&mut take(VOCAB_TAG)?)?;
        let collection = Collection::read_from(&mut take(COLLECTION_TAG)?, vocab)?;
        if collection.fingerprint() != manifest.fingerprint {
            return Err(Error::Corrupt("collection fingerprint mismatch".into()));
        }
        let sa = SuffixArray::read_from(&mut take(SA_TAG)?)?;
        let df = DocFrequency::read_from(&mut take(DF_TAG)?)?;
        let lcp = match variant.has_repetitions() {
            true => Some(LcpArray::read_from(&mut take(LCP_TAG)?)?),
            false => None,
        };
        let docs = match variant {
            Variant::D | Variant::DR => Some(DocArray::read_from(&mut take(DOCS_TAG)?)?),
            Variant::D1R1 => None,
        };
        let reps = match variant {
            Variant::DR => Some(RepetitionIndex::read_from(&mut take(REPS_TAG)?)?),
            _ => None,
        };
        let restricted = match variant {
            Variant::D1R1 => Some(RestrictedIndex::read_from(&mut take(RESTRICTED_TAG)?)?),
            _ => None,
        };
        let n = collection.len();
        let num_docs = collection.num_docs() as u32;
        let consistent = sa.len() == n
            && df.len() == n
            && df.h().len() == 2 * n - num_docs as usize
            && lcp.as_ref().is_none_or(|l| l.len() == n)
            && docs.as_ref().is_none_or(|d| d.wt().len() == n && d.wt().sigma() == num_docs)
            && reps.as_ref().is_none_or(|r| r.wt().sigma() == num_docs && r.keep().len() == n - num_docs as usize)
            && restricted.as_ref().is_none_or(|r| r.d1().sigma() == num_docs && r.rhat1().sigma() == num_docs);
        if !consistent {
            return Err(Error::Corrupt("component sizes disagree with the collection".into()));
        }
        Ok(Self { variant, collection, sa, lcp, df, docs, reps, restricted })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentEntry {
    pub tag: String,
    pub file: String,
    pub bytes: u64,
    pub checksum: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub format: u32,
    pub variant: Variant,
    pub fingerprint: u64,
    pub components: Vec<ComponentEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE))
            .map_err(|e| Error::Corrupt(format!("cannot read manifest in {}: {e}", dir.display())))?;
        text.parse()
    }

    pub fn component(&self, tag: &str) -> Option<&ComponentEntry> {
        self.components.iter().find(|c| c.tag == tag)
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "format={}", self.format)?;
        writeln!(f, "variant={}", self.variant)?;
        writeln!(f, "fingerprint={:016x}", self.fingerprint)?;
        for c in &self.components {
            writeln!(f, "component={} {} {} {:016x}", c.tag, c.file, c.bytes, c.checksum)?;
        }
        Ok(())
    }
}

impl FromStr for Manifest {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Corrupt(format!("manifest: {msg}"));
        let (mut format, mut variant, mut fingerprint) = (None, None, None);
        let mut components = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("malformed line {line:?}")))?;
            match key {
                "format" => format = Some(value.parse::<u32>().map_err(|e| bad(e.to_string()))?),
                "variant" => variant = Some(value.parse::<Variant>()?),
                "fingerprint" => fingerprint = Some(u64::from_str_radix(value, 16).map_err(|e| bad(e.to_string()))?),
                "component" => {
                    let parts: Vec<&str> = value.split(' ').collect();
                    let [tag, file, bytes, checksum] = parts[..] else {
                        return Err(bad(format!("malformed component {value:?}")));
                    };
                    let safe = !file.is_empty() && !file.contains(['/', '\\']) && file != "..";
                    if tag.len() != 4 || !safe {
                        return Err(bad(format!("malformed component {value:?}")));
                    }
                    components.push(ComponentEntry {
                        tag: tag.to_owned(),
                        file: file.to_owned(),
                        bytes: bytes.parse().map_err(|_| bad(format!("bad length {bytes:?}")))?,
                        checksum: u64::from_str_radix(checksum, 16)
                            .map_err(|_| bad(format!("bad checksum {checksum:?}")))?,
                    });
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let format = format.ok_or_else(|| bad("missing format".into()))?;
        if format != FORMAT_VERSION as u32 {
            return Err(bad(format!("unsupported format {format}")));
        }
        Ok(Self {
            format,
            variant: variant.ok_or_else(|| bad("missing variant".into()))?,
            fingerprint: fingerprint.ok_or_else(|| bad("missing fingerprint".into()))?,
            components,
        })
    }
}
