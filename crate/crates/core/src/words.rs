//! Exact algebra of a free group of finite rank: letters, freely reduced words,
//! conjugacy classes and automorphisms given by basis images.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("letter code 0 does not denote a generator")]
    ZeroLetter,
    #[error("automorphisms over different ranks ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("Nielsen reduction exhausted its effort bound of {0} moves")]
    EffortExhausted(usize),
    #[error("negative iterate requested but no verified inverse is attached")]
    MissingInverse,
    #[error("supplied inverse does not compose to the identity")]
    BadInverse,
}

/// A basis letter or its inverse. Generators are numbered from 1.
///
/// The total order used for canonical forms is `a < a' < b < b' < ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generators are numbered from 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    /// Builds a letter from a signed code: `k > 0` is generator `k`, `-k` its inverse.
    pub fn from_signed(code: i32) -> Result<Letter, WordError> {
        if code == 0 {
            Err(WordError::ZeroLetter)
        } else {
            Ok(Letter(code))
        }
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    /// 1-based generator index.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Dense code in `0..2*rank`, ordered consistently with `Ord`.
    pub fn code(self) -> usize {
        2 * (self.generator() - 1) + usize::from(self.is_inverse())
    }

    pub fn from_code(code: usize) -> Letter {
        Letter::new(code / 2 + 1, code % 2 == 1)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Basis::default_name(self.generator()))?;
        if self.is_inverse() {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// Appends `l` to an already reduced buffer, cancelling when possible.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&l.inverse()) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

/// Freely reduces `letters`, checking every generator against `rank`.
pub fn reduce(letters: &[Letter], rank: usize) -> Result<ReducedWord, WordError> {
    let mut buf = Vec::with_capacity(letters.len());
    for &l in letters {
        if l.generator() > rank {
            return Err(WordError::GeneratorOutOfRange {
                index: l.generator(),
                rank,
            });
        }
        push_reduced(&mut buf, l);
    }
    Ok(ReducedWord { letters: buf })
}

impl ReducedWord {
    pub fn identity() -> ReducedWord {
        ReducedWord::default()
    }

    pub fn letter(l: Letter) -> ReducedWord {
        ReducedWord { letters: vec![l] }
    }

    /// Reduces a sequence of letters without a rank check.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> ReducedWord {
        let mut buf = Vec::new();
        for l in letters {
            push_reduced(&mut buf, l);
        }
        ReducedWord { letters: buf }
    }

    /// Convenience constructor from signed generator codes, e.g. `[1, 2, -1]` is `a b a'`.
    pub fn from_signed(codes: &[i32], rank: usize) -> Result<ReducedWord, WordError> {
        let letters = codes
            .iter()
            .map(|&c| Letter::from_signed(c))
            .collect::<Result<Vec<_>, _>>()?;
        reduce(&letters, rank)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.letters
            .iter()
            .map(|l| l.generator())
            .max()
            .unwrap_or(0)
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        let mut buf = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut buf, l);
        }
        ReducedWord { letters: buf }
    }

    pub fn pow(&self, k: i64) -> ReducedWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = ReducedWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `u · self · u⁻¹`, reduced.
    pub fn conjugate_by(&self, u: &ReducedWord) -> ReducedWord {
        u.mul(self).mul(&u.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Index of the lexicographically least rotation of `s` (Booth's algorithm).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut fail = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != usize::MAX && sj != at(k + i + 1) {
            if sj < at(k + i + 1) {
                k = j - i - 1;
            }
            i = fail[i];
        }
        if i == usize::MAX && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = usize::MAX;
        } else {
            fail[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    k % n
}

/// A conjugacy class, stored as the least rotation of a cyclically reduced word.
///
/// `w` and `w⁻¹` are distinct classes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

/// Splits `w` as `conjugator · core · conjugator⁻¹` with `core` canonical and
/// cyclically reduced.
pub fn cyclic_reduce(w: &ReducedWord) -> (CyclicWord, ReducedWord) {
    let l = w.letters();
    let (mut i, mut j) = (0usize, l.len());
    while j >= i + 2 && l[i] == l[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    let core = &l[i..j];
    let r = least_rotation(core);
    let mut canonical = Vec::with_capacity(core.len());
    canonical.extend_from_slice(&core[r..]);
    canonical.extend_from_slice(&core[..r]);
    // w = u · s·t · u⁻¹ with core = s·t, canonical = t·s, so conjugator = u·s.
    let mut conj = l[..i].to_vec();
    for &x in &core[..r] {
        push_reduced(&mut conj, x);
    }
    (
        CyclicWord { letters: canonical },
        ReducedWord { letters: conj },
    )
}

impl CyclicWord {
    pub fn trivial() -> CyclicWord {
        CyclicWord::default()
    }

    pub fn from_word(w: &ReducedWord) -> CyclicWord {
        cyclic_reduce(w).0
    }

    pub fn from_signed(codes: &[i32], rank: usize) -> Result<CyclicWord, WordError> {
        Ok(CyclicWord::from_word(&ReducedWord::from_signed(
            codes, rank,
        )?))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    /// The canonical representative as an element of the group.
    pub fn to_word(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.clone(),
        }
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::from_word(&self.to_word().inverse())
    }

    /// All rotations of the canonical representative, starting with itself.
    pub fn rotations(&self) -> impl Iterator<Item = ReducedWord> + '_ {
        let n = self.letters.len();
        (0..n.max(1)).map(move |s| {
            let mut v = Vec::with_capacity(n);
            v.extend_from_slice(&self.letters[s.min(n)..]);
            v.extend_from_slice(&self.letters[..s.min(n)]);
            ReducedWord { letters: v }
        })
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.to_word())
    }
}

/// Generator names used for parsing and printing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    names: Vec<String>,
}

impl Basis {
    pub fn new(names: Vec<String>) -> Basis {
        Basis { names }
    }

    /// `a, b, c, ...` for small ranks, `x1, x2, ...` beyond 26.
    pub fn standard(rank: usize) -> Basis {
        Basis {
            names: (1..=rank).map(Basis::default_name).collect(),
        }
    }

    pub fn default_name(generator: usize) -> String {
        if generator <= 26 {
            ((b'a' + (generator - 1) as u8) as char).to_string()
        } else {
            format!("x{generator}")
        }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// 1-based generator index for `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).map(|i| i + 1)
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let base = self
            .names
            .get(l.generator() - 1)
            .cloned()
            .unwrap_or_else(|| Basis::default_name(l.generator()));
        if l.is_inverse() {
            format!("{base}'")
        } else {
            base
        }
    }

    /// Space separated, in the same syntax the parser accepts.
    pub fn format(&self, w: &ReducedWord) -> String {
        self.format_letters(w.letters())
    }

    pub fn format_letters(&self, letters: &[Letter]) -> String {
        if letters.is_empty() {
            return "1".to_string();
        }
        letters
            .iter()
            .map(|&l| self.letter_name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// An endomorphism of the free group given by basis images, carrying a
/// verified inverse once one is known.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<ReducedWord>,
    inverse_images: Option<Vec<ReducedWord>>,
}

impl fmt::Debug for FreeAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = Basis::standard(self.rank);
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", basis.names()[i], basis.format(w)))
            .collect();
        write!(f, "{}", parts.join(" ; "))
    }
}

/// One elementary Nielsen move on a tuple: `u[target] <- u[target] · u[other]^±` (or on the left).
#[derive(Clone, Copy, Debug)]
struct NielsenMove {
    target: usize,
    other: usize,
    inverse: bool,
    left: bool,
}

impl NielsenMove {
    fn apply(&self, tuple: &[ReducedWord]) -> ReducedWord {
        let o = if self.inverse {
            tuple[self.other].inverse()
        } else {
            tuple[self.other].clone()
        };
        if self.left {
            o.mul(&tuple[self.target])
        } else {
            tuple[self.target].mul(&o)
        }
    }

    fn all(n: usize) -> impl Iterator<Item = NielsenMove> {
        (0..n).flat_map(move |target| {
            (0..n)
                .filter(move |&other| other != target)
                .flat_map(move |other| {
                    [(false, false), (true, false), (false, true), (true, true)]
                        .into_iter()
                        .map(move |(inverse, left)| NielsenMove {
                            target,
                            other,
                            inverse,
                            left,
                        })
                })
        })
    }
}

impl FreeAutomorphism {
    /// Builds the endomorphism sending generator `i+1` to `images[i]`.
    pub fn new(images: Vec<ReducedWord>) -> Result<FreeAutomorphism, WordError> {
        let rank = images.len();
        for w in &images {
            if w.max_generator() > rank {
                return Err(WordError::GeneratorOutOfRange {
                    index: w.max_generator(),
                    rank,
                });
            }
        }
        Ok(FreeAutomorphism {
            rank,
            images,
            inverse_images: None,
        })
    }

    pub fn from_signed(images: &[&[i32]]) -> Result<FreeAutomorphism, WordError> {
        let rank = images.len();
        let ws = images
            .iter()
            .map(|c| ReducedWord::from_signed(c, rank))
            .collect::<Result<Vec<_>, _>>()?;
        FreeAutomorphism::new(ws)
    }

    pub fn identity(rank: usize) -> FreeAutomorphism {
        let images: Vec<ReducedWord> = (1..=rank)
            .map(|g| ReducedWord::letter(Letter::new(g, false)))
            .collect();
        FreeAutomorphism {
            rank,
            inverse_images: Some(images.clone()),
            images,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    pub fn image(&self, generator: usize) -> &ReducedWord {
        &self.images[generator - 1]
    }

    pub fn has_verified_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    /// The verified inverse, itself carrying `self` as its inverse.
    pub fn inverse(&self) -> Option<FreeAutomorphism> {
        self.inverse_images.as_ref().map(|inv| FreeAutomorphism {
            rank: self.rank,
            images: inv.clone(),
            inverse_images: Some(self.images.clone()),
        })
    }

    /// Attaches `inverse` after checking both compositions fix the basis.
    pub fn with_inverse(
        mut self,
        inverse: Vec<ReducedWord>,
    ) -> Result<FreeAutomorphism, WordError> {
        if inverse.len() != self.rank {
            return Err(WordError::RankMismatch(self.rank, inverse.len()));
        }
        let psi = FreeAutomorphism::new(inverse.clone())?;
        let id = FreeAutomorphism::identity(self.rank);
        if self.compose(&psi).images != id.images || psi.compose(&self).images != id.images {
            return Err(WordError::BadInverse);
        }
        self.inverse_images = Some(inverse);
        Ok(self)
    }

    pub fn apply_letter(&self, l: Letter) -> ReducedWord {
        let w = &self.images[l.generator() - 1];
        if l.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    /// Substitutes basis images and reduces.
    pub fn apply(&self, w: &ReducedWord) -> ReducedWord {
        let mut buf = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.generator() - 1];
            if l.is_inverse() {
                for &x in img.letters().iter().rev() {
                    push_reduced(&mut buf, x.inverse());
                }
            } else {
                for &x in img.letters() {
                    push_reduced(&mut buf, x);
                }
            }
        }
        ReducedWord { letters: buf }
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeAutomorphism) -> FreeAutomorphism {
        assert_eq!(self.rank, other.rank, "composition across ranks");
        let images = other.images.iter().map(|w| self.apply(w)).collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(a), Some(b)) => {
                let a = FreeAutomorphism {
                    rank: self.rank,
                    images: a.clone(),
                    inverse_images: None,
                };
                let b = FreeAutomorphism {
                    rank: self.rank,
                    images: b.clone(),
                    inverse_images: None,
                };
                Some(b.compose(&a).images)
            }
            _ => None,
        };
        FreeAutomorphism {
            rank: self.rank,
            images,
            inverse_images,
        }
    }

    pub fn try_compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        Ok(self.compose(other))
    }

    /// `k`-th power; negative powers need a verified inverse.
    pub fn power(&self, k: i64) -> Result<FreeAutomorphism, WordError> {
        let base = if k < 0 {
            self.inverse().ok_or(WordError::MissingInverse)?
        } else {
            self.clone()
        };
        let mut out = FreeAutomorphism::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = base.compose(&out);
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [Letter::new(i + 1, false)])
    }

    /// Returns `u` when `self` is conjugation `x ↦ u x u⁻¹`.
    pub fn inner_conjugator(&self) -> Option<ReducedWord> {
        if self.rank == 0 {
            return Some(ReducedWord::identity());
        }
        let a = Letter::new(1, false);
        let (core, conj) = cyclic_reduce(&self.images[0]);
        if core.letters() != [a] {
            return None;
        }
        // every u with u a u⁻¹ = image lies in conj·⟨a⟩
        let candidate = if self.rank == 1 {
            conj
        } else {
            let b = Letter::new(2, false);
            let z = self.images[1].conjugate_by(&conj.inverse());
            let zl = z.letters();
            let mut j = 0usize;
            let mut sign = 0i64;
            while j < zl.len() && zl[j].generator() == 1 {
                sign = if zl[j] == a { 1 } else { -1 };
                j += 1;
            }
            let k = sign * j as i64;
            let u = conj.mul(&ReducedWord::letter(a).pow(k));
            if ReducedWord::letter(b).conjugate_by(&u) != self.images[1] {
                return None;
            }
            u
        };
        let ok = self.images.iter().enumerate().all(|(i, w)| {
            ReducedWord::letter(Letter::new(i + 1, false)).conjugate_by(&candidate) == *w
        });
        ok.then_some(candidate)
    }

    /// Finds and attaches an inverse by greedy length-reducing Nielsen moves.
    pub fn invert(&self, effort_bound: usize) -> Result<FreeAutomorphism, WordError> {
        let n = self.rank;
        let mut u = self.images.clone();
        // u[i] = self(t[i]) throughout
        let mut t: Vec<ReducedWord> = (1..=n)
            .map(|g| ReducedWord::letter(Letter::new(g, false)))
            .collect();
        let mut moves = 0usize;
        loop {
            if let Some(i) = u.iter().position(|w| w.is_empty()) {
                return Err(WordError::NotAnAutomorphism(format!(
                    "image tuple reduces to a trivial element at position {}",
                    i + 1
                )));
            }
            let total: usize = u.iter().map(|w| w.len()).sum();
            if total == n {
                let mut inverse = vec![ReducedWord::identity(); n];
                let mut seen = vec![false; n];
                for (i, w) in u.iter().enumerate() {
                    let l = w.letters()[0];
                    if seen[l.generator() - 1] {
                        return Err(WordError::NotAnAutomorphism(
                            "images collapse onto a proper set of generators".into(),
                        ));
                    }
                    seen[l.generator() - 1] = true;
                    inverse[l.generator() - 1] = if l.is_inverse() {
                        t[i].inverse()
                    } else {
                        t[i].clone()
                    };
                }
                let mut out = self.clone();
                out.inverse_images = Some(inverse);
                return Ok(out);
            }
            if moves >= effort_bound {
                return Err(WordError::EffortExhausted(effort_bound));
            }
            let best = NielsenMove::all(n)
                .map(|m| {
                    let w = m.apply(&u);
                    (w.len() as isize - u[m.target].len() as isize, m, w)
                })
                .filter(|(d, _, _)| *d < 0)
                .min_by_key(|(d, _, _)| *d);
            match best {
                Some((_, m, w)) => {
                    t[m.target] = m.apply(&t);
                    u[m.target] = w;
                    moves += 1;
                }
                None => match plateau_escape(&u, &t, effort_bound - moves) {
                    Some((nu, nt, used)) => {
                        u = nu;
                        t = nt;
                        moves += used;
                    }
                    None => {
                        return Err(WordError::NotAnAutomorphism(format!(
                            "Nielsen reduction stabilizes at total length {total} > {n}"
                        )))
                    }
                },
            }
        }
    }

    /// `k`-fold image of a conjugacy class, cyclically reduced after each step.
    pub fn iterate_class(&self, c: &CyclicWord, k: i64) -> Result<CyclicWord, WordError> {
        let map = if k < 0 {
            self.inverse().ok_or(WordError::MissingInverse)?
        } else {
            self.clone()
        };
        let mut w = c.to_word();
        for _ in 0..k.unsigned_abs() {
            w = CyclicWord::from_word(&map.apply(&w)).to_word();
        }
        Ok(CyclicWord::from_word(&w))
    }

    /// `k`-fold image of a word (no cyclic reduction).
    pub fn iterate_word(&self, w: &ReducedWord, k: i64) -> Result<ReducedWord, WordError> {
        let map = if k < 0 {
            self.inverse().ok_or(WordError::MissingInverse)?
        } else {
            self.clone()
        };
        let mut w = w.clone();
        for _ in 0..k.unsigned_abs() {
            w = map.apply(&w);
        }
        Ok(w)
    }

    /// Largest image length, the Lipschitz constant of the map on words.
    pub fn lipschitz(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }
}

/// All reduced words of length exactly `n`, in lexicographic order.
pub fn enumerate_reduced_words(rank: usize, n: usize) -> Vec<ReducedWord> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    extend_words(rank, n, &mut buf, &mut |w| {
        out.push(ReducedWord {
            letters: w.to_vec(),
        })
    });
    out
}

/// Canonical representatives of all conjugacy classes of cyclic length `n`, in lexicographic order.
pub fn enumerate_cyclic_words(rank: usize, n: usize) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(n);
    extend_words(rank, n, &mut buf, &mut |w| {
        if n > 0 && w[0] == w[n - 1].inverse() {
            return;
        }
        if least_rotation(w) == 0 {
            out.push(CyclicWord {
                letters: w.to_vec(),
            });
        }
    });
    out
}

fn extend_words(rank: usize, n: usize, buf: &mut Vec<Letter>, emit: &mut dyn FnMut(&[Letter])) {
    if buf.len() == n {
        emit(buf);
        return;
    }
    for code in 0..2 * rank {
        let l = Letter::from_code(code);
        if buf.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        buf.push(l);
        extend_words(rank, n, buf, emit);
        buf.pop();
    }
}

/// Breadth-first search through length-preserving Nielsen moves until a
/// length-reducing move becomes available.
fn plateau_escape(
    u: &[ReducedWord],
    t: &[ReducedWord],
    budget: usize,
) -> Option<(Vec<ReducedWord>, Vec<ReducedWord>, usize)> {
    let n = u.len();
    let total: usize = u.iter().map(|w| w.len()).sum();
    let mut seen: HashSet<Vec<ReducedWord>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(u.to_vec());
    queue.push_back((u.to_vec(), t.to_vec(), 0usize));
    let mut expanded = 0usize;
    while let Some((cu, ct, depth)) = queue.pop_front() {
        expanded += 1;
        if expanded > budget.max(1) * 4 {
            return None;
        }
        for m in NielsenMove::all(n) {
            let w = m.apply(&cu);
            let nl = total as isize - cu[m.target].len() as isize + w.len() as isize;
            if nl as usize > total {
                continue;
            }
            let mut nu = cu.clone();
            let mut nt = ct.clone();
            nt[m.target] = m.apply(&ct);
            nu[m.target] = w;
            if (nl as usize) < total {
                return Some((nu, nt, depth + 1));
            }
            if seen.insert(nu.clone()) {
                queue.push_back((nu, nt, depth + 1));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(codes: &[i32]) -> ReducedWord {
        ReducedWord::from_signed(codes, 3).unwrap()
    }

    fn fib() -> FreeAutomorphism {
        FreeAutomorphism::from_signed(&[&[1, 2], &[1]]).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let l = |c| Letter::from_signed(c).unwrap();
        assert_eq!(reduce(&[l(1), l(2), l(-2), l(3)], 3).unwrap(), w(&[1, 3]));
        assert!(reduce(&[], 3).unwrap().is_identity());
        assert_eq!(reduce(&[l(1), l(-1), l(1)], 3).unwrap(), w(&[1]));
        assert_eq!(
            reduce(&[l(4)], 3),
            Err(WordError::GeneratorOutOfRange { index: 4, rank: 3 })
        );
    }

    #[test]
    fn letter_order_puts_inverse_after_generator() {
        let a = Letter::new(1, false);
        assert!(a < a.inverse());
        assert!(a.inverse() < Letter::new(2, false));
        for code in 0..8 {
            assert_eq!(Letter::from_code(code).code(), code);
        }
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (c, u) = cyclic_reduce(&w(&[2, 1, -2]));
        assert_eq!(c.letters(), w(&[1]).letters());
        assert_eq!(u, w(&[2]));

        let (c, u) = cyclic_reduce(&w(&[1, 2]));
        assert_eq!(c.to_word(), w(&[1, 2]));
        assert!(u.is_identity());

        let (c, u) = cyclic_reduce(&w(&[2, 1, 1, -2]));
        assert_eq!(c.to_word(), w(&[1, 1]));
        assert_eq!(u, w(&[2]));

        let (c, u) = cyclic_reduce(&ReducedWord::identity());
        assert!(c.is_trivial() && u.is_identity());
    }

    #[test]
    fn cyclic_reduce_rotation_conjugator_reconstructs() {
        let x = w(&[2, 3, 1, -2, 1]);
        let (c, u) = cyclic_reduce(&x);
        assert_eq!(c.to_word().conjugate_by(&u), x);
    }

    #[test]
    fn least_rotation_matches_brute_force() {
        let cases: Vec<Vec<u8>> = vec![
            vec![3, 1, 2, 1],
            vec![1, 1, 1],
            vec![2, 1, 2, 1, 1],
            vec![5],
            vec![2, 2, 1, 2, 2, 1, 2],
        ];
        for s in cases {
            let k = least_rotation(&s);
            let rot = |i: usize| [&s[i..], &s[..i]].concat();
            let best = (0..s.len()).map(rot).min().unwrap();
            assert_eq!(rot(k), best);
        }
    }

    #[test]
    fn apply_examples() {
        let phi = fib();
        let w2 = |c: &[i32]| ReducedWord::from_signed(c, 2).unwrap();
        assert_eq!(phi.apply(&w2(&[2, 1])), w2(&[1, 1, 2]));
        assert_eq!(phi.apply(&w2(&[1, -2])), w2(&[1, 2, -1]));
        let id = FreeAutomorphism::identity(3);
        assert_eq!(id.apply(&w(&[3, -1, 2])), w(&[3, -1, 2]));
    }

    #[test]
    fn compose_examples() {
        let phi = fib();
        let sq = phi.compose(&phi);
        let w2 = |c: &[i32]| ReducedWord::from_signed(c, 2).unwrap();
        assert_eq!(sq.images(), &[w2(&[1, 2, 1]), w2(&[1, 2])]);
        assert_eq!(
            FreeAutomorphism::identity(2).compose(&phi).images(),
            phi.images()
        );
        let inv = phi.invert(100).unwrap().inverse().unwrap();
        assert!(phi.compose(&inv).is_identity());
    }

    #[test]
    fn invert_examples() {
        let phi = fib().invert(100).unwrap();
        let inv = phi.inverse().unwrap();
        let w2 = |c: &[i32]| ReducedWord::from_signed(c, 2).unwrap();
        assert_eq!(inv.images(), &[w2(&[2]), w2(&[-2, 1])]);

        let collapse = FreeAutomorphism::from_signed(&[&[1], &[1]]).unwrap();
        assert!(matches!(
            collapse.invert(100),
            Err(WordError::NotAnAutomorphism(_))
        ));

        let id = FreeAutomorphism::identity(3).invert(10).unwrap();
        assert!(id.inverse().unwrap().is_identity());
    }

    #[test]
    fn invert_rejects_proper_finite_index_image() {
        // ⟨ab, ab'⟩ has index 2
        let phi = FreeAutomorphism::from_signed(&[&[1, 2], &[1, -2]]).unwrap();
        assert!(matches!(
            phi.invert(100),
            Err(WordError::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn invert_effort_bound() {
        let phi = fib().power(12).unwrap();
        assert_eq!(phi.invert(1), Err(WordError::EffortExhausted(1)));
    }

    #[test]
    fn iterate_class_examples() {
        let phi = fib().invert(100).unwrap();
        let a = CyclicWord::from_signed(&[1], 2).unwrap();
        assert_eq!(phi.iterate_class(&a, 0).unwrap(), a);
        assert_eq!(
            phi.iterate_class(&a, 3).unwrap(),
            CyclicWord::from_signed(&[1, 2, 1, 1, 2], 2).unwrap()
        );
        let fixed = FreeAutomorphism::from_signed(&[&[1, 2], &[1], &[3]]).unwrap();
        let c = CyclicWord::from_signed(&[3], 3).unwrap();
        assert_eq!(fixed.iterate_class(&c, 7).unwrap(), c);
        assert_eq!(fixed.iterate_class(&c, -1), Err(WordError::MissingInverse));
        let back = phi
            .iterate_class(&phi.iterate_class(&a, 4).unwrap(), -4)
            .unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn inner_conjugator_detection() {
        // conjugation by b a
        let u = ReducedWord::from_signed(&[2, 1], 3).unwrap();
        let images = (1..=3)
            .map(|g| ReducedWord::letter(Letter::new(g, false)).conjugate_by(&u))
            .collect();
        let inner = FreeAutomorphism::new(images).unwrap();
        assert_eq!(inner.inner_conjugator(), Some(u));
        assert_eq!(fib().inner_conjugator(), None);
        assert_eq!(
            FreeAutomorphism::identity(2).inner_conjugator(),
            Some(ReducedWord::identity())
        );
    }

    #[test]
    fn with_inverse_checks_composition() {
        let w2 = |c: &[i32]| ReducedWord::from_signed(c, 2).unwrap();
        assert!(fib().with_inverse(vec![w2(&[2]), w2(&[-2, 1])]).is_ok());
        assert_eq!(
            fib().with_inverse(vec![w2(&[2]), w2(&[1])]),
            Err(WordError::BadInverse)
        );
    }
}
