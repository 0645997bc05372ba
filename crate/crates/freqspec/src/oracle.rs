//! Brute-force reference implementations used by the test suite and the CLI:
//! necklace enumeration of cyclic words, direct image-ratio scans, and naive
//! transfer verification. Everything here recomputes images by plain
//! substitution, sharing only the word-arithmetic layer with the analytic
//! modules.

use crate::automorphism::{NielsenGen, NielsenWord, TransferTable};
use crate::error::Result;
use crate::words::{self, Alphabet, CyclicWord, Letter, Word};
use crate::Rational;
use num_bigint::BigInt;

/// Streams every cyclically reduced necklace (one canonical representative
/// per cyclic word) of length 1..=max_len, in (length, lexicographic) order.
pub struct WordEnumerator {
    alphabet: Alphabet,
    max_len: usize,
    length: usize,
    // canonical codes of the current raw string; empty means "start fresh"
    digits: Vec<usize>,
    exhausted: bool,
}

impl WordEnumerator {
    pub fn new(alphabet: Alphabet, max_len: usize) -> Self {
        WordEnumerator {
            alphabet,
            max_len,
            length: 1,
            digits: Vec::new(),
            exhausted: max_len == 0,
        }
    }

    /// Advances `digits` to the next freely reduced string of the current
    /// length; false when the length is exhausted.
    fn advance(&mut self) -> bool {
        let letter_count = self.alphabet.letter_count();
        if self.digits.is_empty() {
            // a^length, which is freely reduced
            self.digits = vec![0; self.length];
            return true;
        }
        // odometer increment
        let mut position = self.length;
        loop {
            if position == 0 {
                return false;
            }
            position -= 1;
            if self.digits[position] + 1 < letter_count {
                self.digits[position] += 1;
                for later in position + 1..self.length {
                    self.digits[later] = 0;
                }
                break;
            }
            self.digits[position] = 0;
        }
        // repair free reducedness left to right, carrying as needed
        let mut i = 1;
        while i < self.length {
            if self.digits[i] != self.digits[i - 1] ^ 1 {
                i += 1;
                continue;
            }
            if self.digits[i] + 1 < letter_count {
                self.digits[i] += 1;
                for later in i + 1..self.length {
                    self.digits[later] = 0;
                }
                i += 1;
            } else {
                // carry into an earlier position, then re-scan from there
                let mut p = i;
                loop {
                    if p == 0 {
                        return false;
                    }
                    p -= 1;
                    if self.digits[p] + 1 < letter_count {
                        self.digits[p] += 1;
                        for later in p + 1..self.length {
                            self.digits[later] = 0;
                        }
                        break;
                    }
                    self.digits[p] = 0;
                }
                i = p.max(1);
            }
        }
        true
    }

    fn current_necklace(&self) -> Option<CyclicWord> {
        // cyclically reduced: the wrap pair must not cancel
        if self.length > 1 && self.digits[self.length - 1] == self.digits[0] ^ 1 {
            return None;
        }
        let letters: Vec<Letter> = self
            .digits
            .iter()
            .map(|&c| Letter::from_canonical_code(c))
            .collect();
        let word = Word::from_reduced(letters);
        let canonical = CyclicWord::new(&word)?;
        // keep only the canonical rotation itself
        (canonical.letters() == word.letters()).then_some(canonical)
    }
}

impl Iterator for WordEnumerator {
    type Item = CyclicWord;

    fn next(&mut self) -> Option<CyclicWord> {
        while !self.exhausted {
            if self.advance() {
                if let Some(necklace) = self.current_necklace() {
                    return Some(necklace);
                }
            } else {
                self.length += 1;
                self.digits.clear();
                if self.length > self.max_len {
                    self.exhausted = true;
                }
            }
        }
        None
    }
}

/// All cyclic words of length at most `max_len`, streamed without
/// materializing the full list.
pub fn enumerate_cyclic_words(alphabet: &Alphabet, max_len: usize) -> WordEnumerator {
    WordEnumerator::new(*alphabet, max_len)
}

/// Cyclic words of one exact length.
pub fn cyclic_words_of_length(
    alphabet: &Alphabet,
    len: usize,
) -> impl Iterator<Item = CyclicWord> {
    let target = len;
    enumerate_cyclic_words(alphabet, len).filter(move |w| w.len() == target)
}

/// Generator images of an automorphism computed by repeated substitution
/// only (no transfer machinery).
pub fn generator_images(auto: &NielsenWord) -> Vec<Word> {
    let rank = auto.rank();
    let mut images: Vec<Word> = (1..=rank)
        .map(|i| Word::single(Letter::generator(i)))
        .collect();
    for gen in auto.gens() {
        let step: Vec<Word> = (1..=rank)
            .map(|i| match *gen {
                NielsenGen::Invert(target) => {
                    if i == target {
                        Word::single(Letter::generator(i).inverse())
                    } else {
                        Word::single(Letter::generator(i))
                    }
                }
                NielsenGen::Swap(a, b) => {
                    if i == a {
                        Word::single(Letter::generator(b))
                    } else if i == b {
                        Word::single(Letter::generator(a))
                    } else {
                        Word::single(Letter::generator(i))
                    }
                }
                NielsenGen::RightMultiply(a, b) => {
                    if i == a {
                        Word::from_letters(&[Letter::generator(a), Letter::generator(b)])
                    } else {
                        Word::single(Letter::generator(i))
                    }
                }
            })
            .collect();
        images = images
            .iter()
            .map(|image| words::substitute(image, &step))
            .collect();
    }
    images
}

/// Image of a conjugacy class by direct substitution and cyclic reduction.
pub fn image_of_class(auto: &NielsenWord, w: &CyclicWord) -> CyclicWord {
    let images = generator_images(auto);
    let image = words::substitute(&w.to_word(), &images);
    CyclicWord::from_word(&image).expect("automorphism images of nontrivial classes are nontrivial")
}

/// Exact distortion-ratio extremes over all classes up to a length bound.
#[derive(Debug, Clone)]
pub struct BruteExtremes {
    pub min_ratio: Rational,
    pub max_ratio: Rational,
    pub argmins: Vec<CyclicWord>,
    pub argmaxes: Vec<CyclicWord>,
}

/// Scans every cyclic word of length <= max_len and records the exact
/// extremes of image length over length, with all witnesses.
pub fn brute_ratio_extremes(auto: &NielsenWord, max_len: usize) -> Result<BruteExtremes> {
    assert!(max_len >= 1);
    let alphabet = auto.alphabet();
    let images = generator_images(auto);
    let mut min_ratio: Option<Rational> = None;
    let mut max_ratio: Option<Rational> = None;
    let mut argmins: Vec<CyclicWord> = Vec::new();
    let mut argmaxes: Vec<CyclicWord> = Vec::new();
    for w in enumerate_cyclic_words(&alphabet, max_len) {
        let image = words::substitute(&w.to_word(), &images);
        let image_len = CyclicWord::from_word(&image)
            .map(|c| c.len())
            .unwrap_or(0);
        let ratio = Rational::new(BigInt::from(image_len as u64), BigInt::from(w.len() as u64));
        match &min_ratio {
            Some(current) if ratio > *current => {}
            Some(current) if ratio == *current => argmins.push(w.clone()),
            _ => {
                min_ratio = Some(ratio.clone());
                argmins = vec![w.clone()];
            }
        }
        match &max_ratio {
            Some(current) if ratio < *current => {}
            Some(current) if ratio == *current => argmaxes.push(w),
            _ => {
                max_ratio = Some(ratio);
                argmaxes = vec![w];
            }
        }
    }
    Ok(BruteExtremes {
        min_ratio: min_ratio.expect("at least one word enumerated"),
        max_ratio: max_ratio.expect("at least one word enumerated"),
        argmins,
        argmaxes,
    })
}

/// A transfer-table prediction that disagrees with the direct count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferCounterexample {
    pub word: CyclicWord,
    pub predicted: u64,
    pub actual: u64,
}

/// Replays a transfer table against direct image counts over a word sample;
/// returns every disagreement.
pub fn verify_transfer(
    auto: &NielsenWord,
    table: &TransferTable,
    sample: impl IntoIterator<Item = CyclicWord>,
) -> Vec<TransferCounterexample> {
    let images = generator_images(auto);
    let mut failures = Vec::new();
    for w in sample {
        let image = CyclicWord::from_word(&words::substitute(&w.to_word(), &images))
            .expect("nontrivial image");
        let actual = words::count_occurrences(&image, table.target());
        let predicted = table.predict(&w);
        if predicted != actual {
            failures.push(TransferCounterexample { word: w, predicted, actual });
        }
    }
    failures
}
