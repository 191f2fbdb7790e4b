use std::sync::Arc;

use crate::codec::index_to_string;
use crate::machine::{BinStr, ParseBinStrError};

type SetSource = dyn Fn() -> Box<dyn Iterator<Item = BinStr> + Send> + Send + Sync;

/// A deterministic, replayable enumeration of distinct strings, all of
/// length at most `max_len`.
#[derive(Clone)]
pub struct StringSet {
    name: String,
    max_len: usize,
    source: Arc<SetSource>,
}

impl std::fmt::Debug for StringSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StringSet")
            .field("name", &self.name)
            .field("max_len", &self.max_len)
            .finish()
    }
}

impl StringSet {
    pub fn new<F>(name: impl Into<String>, max_len: usize, source: F) -> StringSet
    where
        F: Fn() -> Box<dyn Iterator<Item = BinStr> + Send> + Send + Sync + 'static,
    {
        StringSet {
            name: name.into(),
            max_len,
            source: Arc::new(source),
        }
    }

    pub fn from_vec(name: impl Into<String>, strings: Vec<BinStr>) -> StringSet {
        let max_len = strings.iter().map(BinStr::len).max().unwrap_or(0);
        let strings = Arc::new(strings);
        StringSet::new(name, max_len, move || {
            let strings = Arc::clone(&strings);
            Box::new((0..strings.len()).map(move |i| strings[i].clone()))
        })
    }

    pub fn empty() -> StringSet {
        StringSet::from_vec("empty", Vec::new())
    }

    /// Every string of length at most `max_len`, length-lex.
    pub fn all(max_len: usize) -> StringSet {
        StringSet::lengths("all", 0, max_len)
    }

    /// Every string with length in `min_len..=max_len`, length-lex.
    pub fn lengths(name: impl Into<String>, min_len: usize, max_len: usize) -> StringSet {
        assert!(max_len < 63);
        let lo = (1u64 << min_len) - 1;
        let hi = (1u64 << (max_len + 1)) - 1;
        StringSet::new(name, max_len, move || Box::new((lo..hi).map(index_to_string)))
    }

    /// Strings of length at most `max_len` accepted by `keep`, length-lex.
    pub fn filtered<P>(name: impl Into<String>, max_len: usize, keep: P) -> StringSet
    where
        P: Fn(&BinStr) -> bool + Send + Sync + 'static,
    {
        let keep = Arc::new(keep);
        let all = StringSet::all(max_len);
        StringSet::new(name, max_len, move || {
            let keep = Arc::clone(&keep);
            Box::new(all.iter().filter(move |s| keep(s)))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = BinStr> + Send> {
        (self.source)()
    }

    pub fn to_vec(&self) -> Vec<BinStr> {
        self.iter().collect()
    }
}

/// One string per line.
pub fn strings_to_lines<'a>(strings: impl IntoIterator<Item = &'a BinStr>) -> String {
    let mut out = String::new();
    for s in strings {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Inverse of [`strings_to_lines`]; a blank line is the empty string.
pub fn strings_from_lines(text: &str) -> Result<Vec<BinStr>, ParseBinStrError> {
    text.lines().map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::bs;

    #[test]
    fn lengths_range() {
        let s = StringSet::lengths("s", 2, 2).to_vec();
        assert_eq!(s, vec![bs("00"), bs("01"), bs("10"), bs("11")]);
        assert_eq!(StringSet::all(1).to_vec(), vec![bs(""), bs("0"), bs("1")]);
    }

    #[test]
    fn lines_round_trip() {
        let v = vec![bs(""), bs("0"), bs("110")];
        assert_eq!(strings_from_lines(&strings_to_lines(&v)).unwrap(), v);
    }
}
