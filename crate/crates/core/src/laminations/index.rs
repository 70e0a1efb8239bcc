//! Generalized suffix automaton over edge-code strings, used for fast
//! "is a subpath of some library segment" queries.

/// Substring index of a finite set of symbol strings. Strings are joined with
/// per-string separator symbols so no match can straddle two of them.
#[derive(Clone, Debug)]
pub struct SegmentIndex {
    next: Vec<Vec<(u32, u32)>>,
    link: Vec<u32>,
    len: Vec<u32>,
    last: u32,
    separator: u32,
    strings: usize,
    total: usize,
}

const ROOT: u32 = 0;
const NO_LINK: u32 = u32::MAX;

impl Default for SegmentIndex {
    fn default() -> Self {
        SegmentIndex::new()
    }
}

impl SegmentIndex {
    pub fn new() -> SegmentIndex {
        SegmentIndex {
            next: vec![Vec::new()],
            link: vec![NO_LINK],
            len: vec![0],
            last: ROOT,
            separator: u32::MAX - 1,
            strings: 0,
            total: 0,
        }
    }

    pub fn string_count(&self) -> usize {
        self.strings
    }

    pub fn total_length(&self) -> usize {
        self.total
    }

    fn get(&self, s: u32, c: u32) -> Option<u32> {
        let row = &self.next[s as usize];
        row.binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| row[i].1)
    }

    fn set(&mut self, s: u32, c: u32, t: u32) {
        let row = &mut self.next[s as usize];
        match row.binary_search_by_key(&c, |&(k, _)| k) {
            Ok(i) => row[i].1 = t,
            Err(i) => row.insert(i, (c, t)),
        }
    }

    fn extend(&mut self, c: u32) {
        let cur = self.next.len() as u32;
        self.next.push(Vec::new());
        self.len.push(self.len[self.last as usize] + 1);
        self.link.push(NO_LINK);
        let mut p = self.last;
        while p != NO_LINK && self.get(p, c).is_none() {
            self.set(p, c, cur);
            p = self.link[p as usize];
        }
        if p == NO_LINK {
            self.link[cur as usize] = ROOT;
        } else {
            let q = self.get(p, c).unwrap();
            if self.len[p as usize] + 1 == self.len[q as usize] {
                self.link[cur as usize] = q;
            } else {
                let clone = self.next.len() as u32;
                self.next.push(self.next[q as usize].clone());
                self.len.push(self.len[p as usize] + 1);
                self.link.push(self.link[q as usize]);
                while p != NO_LINK && self.get(p, c) == Some(q) {
                    self.set(p, c, clone);
                    p = self.link[p as usize];
                }
                self.link[q as usize] = clone;
                self.link[cur as usize] = clone;
            }
        }
        self.last = cur;
    }

    /// Adds one string. Symbols must be below `u32::MAX - 2^20`.
    pub fn insert(&mut self, s: &[u32]) {
        for &c in s {
            debug_assert!(c < u32::MAX - (1 << 20));
            self.extend(c);
        }
        let sep = self.separator;
        self.separator -= 1;
        self.extend(sep);
        self.strings += 1;
        self.total += s.len();
    }

    pub fn contains(&self, pattern: &[u32]) -> bool {
        let mut s = ROOT;
        for &c in pattern {
            match self.get(s, c) {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// `out[j]` is the length of the longest suffix of `text[..=j]` that occurs
    /// in some indexed string.
    pub fn matching_statistics(&self, text: &[u32]) -> Vec<usize> {
        let mut out = Vec::with_capacity(text.len());
        let mut s = ROOT;
        let mut l = 0u32;
        for &c in text {
            loop {
                if let Some(t) = self.get(s, c) {
                    s = t;
                    l += 1;
                    break;
                }
                if s == ROOT {
                    l = 0;
                    break;
                }
                s = self.link[s as usize];
                l = self.len[s as usize];
            }
            out.push(l as usize);
        }
        out
    }
}
