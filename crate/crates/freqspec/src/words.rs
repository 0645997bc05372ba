//! Free-group word arithmetic: free and cyclic reduction, cyclic words in
//! canonical rotation, occurrence counting with wrap-around, frequencies,
//! and deepest roots.

use crate::error::{Error, Result};
use crate::polytope::FrequencyVector;
use crate::Rational;
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// A single signed generator: positive values are generators, negation is
/// inversion, so `Letter(-i)` is the inverse of `Letter(i)`. Zero is invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(value: i32) -> Result<Self> {
        if value == 0 {
            return Err(Error::Parse("letter value 0 is not a generator".into()));
        }
        Ok(Letter(value))
    }

    /// The i-th generator, 1-based.
    pub fn generator(index: usize) -> Self {
        Letter(index as i32)
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// 1-based generator index, ignoring sign.
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// Position in the canonical order a_1 < a_1^{-1} < a_2 < ... < a_k^{-1}.
    pub fn canonical_code(self) -> usize {
        2 * (self.index() - 1) + usize::from(self.is_inverse())
    }

    pub fn from_canonical_code(code: usize) -> Self {
        let index = code / 2 + 1;
        if code % 2 == 0 {
            Letter(index as i32)
        } else {
            Letter(-(index as i32))
        }
    }

    pub fn to_char(self) -> char {
        let base = b'a' + (self.index() - 1) as u8;
        if self.is_inverse() {
            base.to_ascii_uppercase() as char
        } else {
            base as char
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        if c.is_ascii_lowercase() {
            Ok(Letter((c as u8 - b'a') as i32 + 1))
        } else if c.is_ascii_uppercase() {
            Ok(Letter(-((c as u8 - b'A') as i32 + 1)))
        } else {
            Err(Error::Parse(format!("unknown letter symbol {c:?}")))
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_code().cmp(&other.canonical_code())
    }
}

/// The generating set of a free group of rank k, with the 2k signed letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::Parse(format!("rank must be at least 2, got {rank}")));
        }
        if rank > 26 {
            return Err(Error::Parse(format!(
                "rank {rank} exceeds 26 (letters are a..z)"
            )));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letter_count(&self) -> usize {
        2 * self.rank
    }

    /// All 2k letters in canonical order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letter_count()).map(Letter::from_canonical_code)
    }

    /// Number of freely reduced words of length m: D(m) = 2k(2k-1)^{m-1},
    /// with D(0) = 1 counting the empty word. Saturates on overflow.
    pub fn word_count(&self, m: usize) -> u128 {
        if m == 0 {
            return 1;
        }
        let base = (2 * self.rank - 1) as u128;
        let mut total = (2 * self.rank) as u128;
        for _ in 1..m {
            total = total.saturating_mul(base);
        }
        total
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() >= 1 && letter.index() <= self.rank
    }

    /// Parses a word literal such as `abA` (uppercase = inverse) and freely
    /// reduces it. The literal `1` denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::with_capacity(text.len());
        for c in text.chars() {
            let letter = Letter::from_char(c)?;
            if !self.contains(letter) {
                return Err(Error::Parse(format!(
                    "letter {c:?} is outside rank {} alphabet",
                    self.rank
                )));
            }
            letters.push(letter);
        }
        Ok(free_reduce(&letters))
    }

    /// Parses a word literal that must define a nonempty cyclic word and
    /// returns its canonical form (input is cyclically reduced first).
    pub fn parse_cyclic(&self, text: &str) -> Result<CyclicWord> {
        let word = self.parse_word(text)?;
        let (core, _) = cyclic_reduce(&word);
        CyclicWord::new(&core).ok_or_else(|| {
            Error::Parse(format!("word {text:?} defines the trivial conjugacy class"))
        })
    }

    /// All freely reduced words of exactly length m, in lexicographic order.
    pub fn words_of_length(&self, m: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(m);
        self.collect_words(m, &mut current, &mut out);
        out
    }

    fn collect_words(&self, m: usize, current: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if current.len() == m {
            out.push(Word(current.clone()));
            return;
        }
        for letter in self.letters() {
            if let Some(&last) = current.last() {
                if last == letter.inverse() {
                    continue;
                }
            }
            current.push(letter);
            self.collect_words(m, current, out);
            current.pop();
        }
    }
}

/// A freely reduced word. The reduction invariant is maintained by every
/// constructor; raw letter sequences go through [`free_reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from letters, freely reducing as needed.
    pub fn from_letters(letters: &[Letter]) -> Self {
        free_reduce(letters)
    }

    /// Wraps a letter sequence that is already freely reduced.
    /// Panics in debug builds if the invariant does not hold.
    pub fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(is_reduced(&letters), "letters are not freely reduced");
        Word(letters)
    }

    pub fn single(letter: Letter) -> Self {
        Word(vec![letter])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product self · other.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        for &letter in &other.0 {
            if letters.last() == Some(&letter.inverse()) {
                letters.pop();
            } else {
                letters.push(letter);
            }
        }
        Word(letters)
    }

    /// First letter, if any.
    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// The subword of the first `len` letters.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    /// The subword of the last `len` letters.
    pub fn suffix(&self, len: usize) -> Word {
        Word(self.0[self.0.len() - len..].to_vec())
    }

    /// Whether `prefix` is an initial segment of this word.
    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.len() >= prefix.0.len() && self.0[..prefix.0.len()] == prefix.0[..]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &letter in &self.0 {
            write!(f, "{}", letter.to_char())?;
        }
        Ok(())
    }
}

fn is_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|pair| pair[0] != pair[1].inverse())
}

/// Freely reduces a raw letter sequence. Idempotent.
pub fn free_reduce(letters: &[Letter]) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &letter in letters {
        if stack.last() == Some(&letter.inverse()) {
            stack.pop();
        } else {
            stack.push(letter);
        }
    }
    Word(stack)
}

/// Splits a freely reduced word as conjugator · core · conjugator^{-1} with a
/// cyclically reduced core. Returns `(core, conjugator)`; the core is empty
/// exactly when the word is trivial.
pub fn cyclic_reduce(word: &Word) -> (Word, Word) {
    let mut letters = word.0.clone();
    let mut conjugator = Vec::new();
    while letters.len() >= 2 && *letters.first().unwrap() == letters.last().unwrap().inverse() {
        conjugator.push(letters.remove(0));
        letters.pop();
    }
    (Word(letters), Word(conjugator))
}

/// Substitutes each generator by its image word and freely reduces.
/// `images[i-1]` is the image of generator i; inverse letters map to the
/// inverse image.
pub fn substitute(word: &Word, images: &[Word]) -> Word {
    let mut letters = Vec::new();
    for &letter in word.letters() {
        let image = &images[letter.index() - 1];
        if letter.is_inverse() {
            for &l in image.0.iter().rev() {
                letters.push(l.inverse());
            }
        } else {
            letters.extend_from_slice(&image.0);
        }
    }
    free_reduce(&letters)
}

/// A nonempty cyclic word: a conjugacy class representative stored as the
/// lexicographically least rotation of its cyclically reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Canonicalizes a cyclically reduced word. Returns `None` for the empty
    /// word; panics in debug builds if the input is not cyclically reduced.
    pub fn new(word: &Word) -> Option<Self> {
        if word.is_empty() {
            return None;
        }
        debug_assert!(
            word.len() == 1 || word.first().unwrap() != word.last().unwrap().inverse(),
            "word is not cyclically reduced"
        );
        let letters = &word.0;
        let start = least_rotation_index(letters);
        let mut rotated = Vec::with_capacity(letters.len());
        rotated.extend_from_slice(&letters[start..]);
        rotated.extend_from_slice(&letters[..start]);
        Some(CyclicWord(rotated))
    }

    /// Cyclically reduces an arbitrary freely reduced word and canonicalizes
    /// the core. `None` when the class is trivial.
    pub fn from_word(word: &Word) -> Option<Self> {
        let (core, _) = cyclic_reduce(word);
        CyclicWord::new(&core)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// The canonical linear representative.
    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    /// Letter at position i mod length.
    pub fn letter_at(&self, i: usize) -> Letter {
        self.0[i % self.0.len()]
    }

    /// The s-th power as a cyclic word.
    pub fn power(&self, s: usize) -> CyclicWord {
        assert!(s >= 1);
        let mut letters = Vec::with_capacity(self.0.len() * s);
        for _ in 0..s {
            letters.extend_from_slice(&self.0);
        }
        CyclicWord(letters)
    }

    /// Reads `len` letters clockwise starting at position `start`, wrapping.
    pub fn read(&self, start: usize, len: usize) -> Word {
        let n = self.0.len();
        let letters: Vec<Letter> = (0..len).map(|t| self.0[(start + t) % n]).collect();
        debug_assert!(is_reduced(&letters));
        Word(letters)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &letter in &self.0 {
            write!(f, "{}", letter.to_char())?;
        }
        Ok(())
    }
}

/// Booth's least-rotation algorithm: index of the lexicographically least
/// rotation in O(n).
fn least_rotation_index(letters: &[Letter]) -> usize {
    let n = letters.len();
    if n <= 1 {
        return 0;
    }
    let at = |i: usize| letters[i % n];
    let mut failure = vec![usize::MAX; 2 * n];
    let mut start = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = failure[j - start - 1];
        while i != usize::MAX && sj != at(start + i + 1) {
            if sj < at(start + i + 1) {
                start = j - i - 1;
            }
            i = failure[i];
        }
        if i == usize::MAX && sj != at(start) {
            if sj < at(start) {
                start = j;
            }
            failure[j - start] = usize::MAX;
        } else {
            failure[j - start] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    start
}

/// Number of positions of `w` from which `u` can be read clockwise, wrapping
/// around as often as needed. By convention the empty word occurs ||w|| times.
pub fn count_occurrences(w: &CyclicWord, u: &Word) -> u64 {
    let n = w.len();
    let mut count = 0u64;
    for start in 0..n {
        if (0..u.len()).all(|t| w.0[(start + t) % n] == u.0[t]) {
            count += 1;
        }
    }
    count
}

/// Non-wrapping occurrence count in a linear word; zero when |u| > |w|.
pub fn count_occurrences_linear(w: &Word, u: &Word) -> u64 {
    if u.len() > w.len() {
        return 0;
    }
    if u.is_empty() {
        return w.len() as u64;
    }
    let mut count = 0u64;
    for start in 0..=(w.len() - u.len()) {
        if w.0[start..start + u.len()] == u.0[..] {
            count += 1;
        }
    }
    count
}

/// Exact frequency f_w(u) = n_w(u) / ||w||.
pub fn frequency(w: &CyclicWord, u: &Word) -> Rational {
    Rational::new(
        BigInt::from(count_occurrences(w, u)),
        BigInt::from(w.len() as u64),
    )
}

/// Writes w = root^exponent with the exponent maximal.
pub fn deepest_root(w: &CyclicWord) -> (CyclicWord, usize) {
    let n = w.len();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        if (0..n).all(|i| w.0[i] == w.0[(i + d) % n]) {
            let root = Word(w.0[..d].to_vec());
            return (CyclicWord::new(&root).unwrap(), n / d);
        }
    }
    unreachable!("every word has itself as a root");
}

/// The level-m frequency vector (f_w(v))_{|v|=m}, stored sparsely.
pub fn frequency_vector(alphabet: &Alphabet, w: &CyclicWord, m: usize) -> FrequencyVector {
    assert!(m >= 1, "frequency vectors are defined for level >= 1");
    let n = w.len();
    let mut counts: BTreeMap<Word, u64> = BTreeMap::new();
    for start in 0..n {
        *counts.entry(w.read(start, m)).or_insert(0) += 1;
    }
    let denom = BigInt::from(n as u64);
    let entries = counts
        .into_iter()
        .map(|(word, c)| (word, Rational::new(BigInt::from(c), denom.clone())))
        .collect();
    FrequencyVector::from_validated(alphabet.rank(), m, entries)
}

/// Shared helpers for the crate's unit tests.
#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub(crate) fn random_cyclic(rng: &mut impl Rng, rank: usize, max_len: usize) -> CyclicWord {
        let alphabet = Alphabet::new(rank).unwrap();
        let letters: Vec<Letter> = alphabet.letters().collect();
        loop {
            let len = rng.random_range(1..=max_len);
            let mut picked = Vec::with_capacity(len);
            for _ in 0..len {
                picked.push(letters[rng.random_range(0..letters.len())]);
            }
            let reduced = free_reduce(&picked);
            if let Some(w) = CyclicWord::from_word(&reduced) {
                return w;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::random_cyclic;
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn word(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    fn cyc(s: &str) -> CyclicWord {
        ab().parse_cyclic(s).unwrap()
    }

    #[test]
    fn free_reduce_cancels_adjacent_inverses() {
        assert_eq!(word("abBa"), word("aa"));
        assert_eq!(word(""), Word::empty());
        assert_eq!(word("aAaA"), Word::empty());
        // idempotent
        let w = word("abBa");
        assert_eq!(free_reduce(w.letters()), w);
    }

    #[test]
    fn parse_rejects_unknown_symbols() {
        assert!(ab().parse_word("a?b").is_err());
        assert!(ab().parse_word("abc").is_err()); // c outside rank 2
        assert!(Alphabet::new(1).is_err());
    }

    #[test]
    fn word_display_round_trips() {
        for text in ["abA", "aa", "1", "BaB"] {
            let w = ab().parse_word(text).unwrap();
            assert_eq!(ab().parse_word(&w.to_string()).unwrap(), w);
        }
        assert_eq!(word("abA").to_string(), "abA");
    }

    #[test]
    fn cyclic_reduce_splits_conjugator() {
        let (core, conj) = cyclic_reduce(&word("baB"));
        assert_eq!(core, word("a"));
        assert_eq!(conj, word("b"));

        let (core, conj) = cyclic_reduce(&word("ab"));
        assert_eq!(core, word("ab"));
        assert!(conj.is_empty());

        // w = conj . core . conj^{-1} as a reduced product
        let w = word("bAbaBab");
        let (core, conj) = cyclic_reduce(&w);
        assert_eq!(conj.concat(&core).concat(&conj.inverse()), w);
        assert_eq!(conj.len() * 2 + core.len(), w.len());
    }

    #[test]
    fn cyclic_words_canonicalize_rotations() {
        assert_eq!(cyc("ba"), cyc("ab"));
        assert_eq!(cyc("abaab"), cyc("aabab"));
        assert_eq!(cyc("abaab").to_string(), "aabab");
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let w = random_cyclic(&mut rng, 2, 12);
            let n = w.len();
            let shift = rng.random_range(0..n);
            let rotated: Vec<Letter> = (0..n).map(|i| w.letter_at(i + shift)).collect();
            assert_eq!(CyclicWord::new(&Word::from_reduced(rotated)).unwrap(), w);
        }
    }

    #[test]
    fn booth_matches_naive_least_rotation() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..300 {
            let w = random_cyclic(&mut rng, 3, 14);
            let letters = w.letters();
            let n = letters.len();
            let naive = (0..n)
                .map(|s| (0..n).map(|i| letters[(s + i) % n]).collect::<Vec<_>>())
                .min()
                .unwrap();
            assert_eq!(letters, &naive[..]);
        }
    }

    #[test]
    fn occurrence_counts_wrap_around() {
        assert_eq!(count_occurrences(&cyc("a"), &word("aaa")), 1);
        assert_eq!(count_occurrences(&cyc("abaab"), &word("aba")), 2);
        assert_eq!(count_occurrences(&cyc("ab"), &word("A")), 0);
        // n_w(1) = ||w||
        assert_eq!(count_occurrences(&cyc("abaab"), &Word::empty()), 5);
    }

    #[test]
    fn wrap_count_matches_power_rule() {
        // The wrap-around count equals the non-wrapping count in z^p once
        // |z^{p-1}| >= 2|u|, restricted to starts in the first period.
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let w = random_cyclic(&mut rng, 2, 8);
            let u = {
                let base = random_cyclic(&mut rng, 2, 6);
                base.read(0, rng.random_range(1..=2 * base.len()))
            };
            let mut p = 1;
            while (p - 1) * w.len() < 2 * u.len() {
                p += 1;
            }
            let power = w.power(p).to_word();
            let mut direct = 0u64;
            for start in 0..w.len() {
                if start + u.len() <= power.len()
                    && power.letters()[start..start + u.len()] == u.letters()[..]
                {
                    direct += 1;
                }
            }
            assert_eq!(count_occurrences(&w, &u), direct);
        }
    }

    #[test]
    fn linear_counts_do_not_wrap() {
        assert_eq!(count_occurrences_linear(&word("aba"), &word("a")), 2);
        assert_eq!(count_occurrences_linear(&word("aba"), &word("abab")), 0);
        assert_eq!(count_occurrences_linear(&word("aabaa"), &word("aa")), 2);
    }

    #[test]
    fn frequencies_are_exact() {
        assert_eq!(
            frequency(&cyc("abaab"), &word("aba")),
            Rational::new(2.into(), 5.into())
        );
        assert_eq!(
            frequency(&cyc("abaab"), &Word::empty()),
            Rational::new(1.into(), 1.into())
        );
        assert_eq!(
            frequency(&cyc("ab"), &word("a")),
            Rational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn deepest_roots() {
        assert_eq!(deepest_root(&cyc("abab")), (cyc("ab"), 2));
        assert_eq!(deepest_root(&cyc("abaab")), (cyc("abaab"), 1));
        assert_eq!(deepest_root(&cyc("aaa")), (cyc("a"), 3));
    }

    #[test]
    fn frequency_vector_of_paper_style_example() {
        let q = frequency_vector(&ab(), &cyc("abaab"), 3);
        let expected: Vec<(&str, i64, i64)> =
            vec![("aba", 2, 5), ("bab", 1, 5), ("aab", 1, 5), ("baa", 1, 5)];
        assert_eq!(q.support().count(), 4);
        for (text, num, den) in expected {
            assert_eq!(q.get(&word(text)), Rational::new(num.into(), den.into()));
        }

        let level1 = frequency_vector(&ab(), &cyc("ab"), 1);
        assert_eq!(level1.get(&word("a")), Rational::new(1.into(), 2.into()));
        assert_eq!(level1.get(&word("b")), Rational::new(1.into(), 2.into()));

        // A longer word with the same level-3 statistics.
        let q2 = frequency_vector(&ab(), &cyc("ababaabaab"), 3);
        assert_eq!(q, q2);
    }

    #[test]
    fn occurrence_identities_on_random_words() {
        // The three counting identities used everywhere downstream:
        // (1) n_w(u) = sum n_w(ux) = sum n_w(xu), (2) sum over |u|=m is ||w||,
        // (3) counts scale under powers.
        let mut rng = StdRng::seed_from_u64(41);
        for rank in [2usize, 3] {
            let alphabet = Alphabet::new(rank).unwrap();
            for _ in 0..150 {
                let w = random_cyclic(&mut rng, rank, 40);
                for m in 0..=3usize {
                    let mut total = 0u64;
                    for u in alphabet.words_of_length(m) {
                        let n_u = count_occurrences(&w, &u);
                        let right: u64 = alphabet
                            .letters()
                            .filter(|&x| u.last() != Some(x.inverse()))
                            .map(|x| count_occurrences(&w, &u.concat(&Word::single(x))))
                            .sum();
                        let left: u64 = alphabet
                            .letters()
                            .filter(|&x| u.first() != Some(x.inverse()))
                            .map(|x| count_occurrences(&w, &Word::single(x).concat(&u)))
                            .sum();
                        assert_eq!(n_u, right);
                        assert_eq!(n_u, left);
                        total += n_u;
                        let s = rng.random_range(1..=3usize);
                        assert_eq!(count_occurrences(&w.power(s), &u), s as u64 * n_u);
                    }
                    if m >= 1 {
                        assert_eq!(total, w.len() as u64);
                    }
                }
            }
        }
    }

    #[test]
    fn frequency_vectors_invariant_under_powers() {
        let mut rng = StdRng::seed_from_u64(57);
        let alphabet = ab();
        for _ in 0..60 {
            let w = random_cyclic(&mut rng, 2, 12);
            let s = rng.random_range(2..=4usize);
            for m in 1..=3usize {
                assert_eq!(
                    frequency_vector(&alphabet, &w, m),
                    frequency_vector(&alphabet, &w.power(s), m)
                );
            }
        }
    }

    #[test]
    fn distinct_root_free_words_separate_at_bounded_level() {
        // Root-free distinct cyclic words get distinct frequency vectors at
        // some level at most ||w||·||u||.
        let mut rng = StdRng::seed_from_u64(71);
        let alphabet = ab();
        for _ in 0..80 {
            let w = random_cyclic(&mut rng, 2, 8);
            let u = random_cyclic(&mut rng, 2, 8);
            let (w, _) = deepest_root(&w);
            let (u, _) = deepest_root(&u);
            if w == u {
                continue;
            }
            let bound = w.len() * u.len();
            let separated = (1..=bound).any(|m| {
                frequency_vector(&alphabet, &w, m) != frequency_vector(&alphabet, &u, m)
            });
            assert!(separated, "{w} and {u} agree up to level {bound}");
        }
    }
}
