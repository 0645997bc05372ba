//! Nielsen automorphisms and their compositions: application to words and
//! conjugacy classes, occurrence-transfer tables, length weights, and the
//! induced fractional-linear action on frequency vectors.

use crate::error::{Error, Result};
use crate::polytope::FrequencyVector;
use crate::words::{free_reduce, Alphabet, CyclicWord, Letter, Word};
use crate::Rational;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

/// An elementary Nielsen automorphism. Indices are 1-based generator indices
/// with `i != j`: `Invert(i)` sends a_i to its inverse, `Swap(i, j)` exchanges
/// a_i and a_j, and `RightMultiply(i, j)` sends a_i to a_i·a_j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NielsenGen {
    Invert(usize),
    Swap(usize, usize),
    RightMultiply(usize, usize),
}

impl NielsenGen {
    pub fn validate(&self, rank: usize) -> Result<()> {
        let check = |i: usize| {
            if i == 0 || i > rank {
                Err(Error::Parse(format!(
                    "generator index {i} outside 1..={rank}"
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            NielsenGen::Invert(i) => check(i),
            NielsenGen::Swap(i, j) | NielsenGen::RightMultiply(i, j) => {
                check(i)?;
                check(j)?;
                if i == j {
                    return Err(Error::Parse(format!(
                        "generator indices must differ, got {i} and {j}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Image of a single letter, as a letter sequence of length 1 or 2.
    pub fn map_letter(&self, letter: Letter) -> Vec<Letter> {
        match *self {
            NielsenGen::Invert(i) => {
                if letter.index() == i {
                    vec![letter.inverse()]
                } else {
                    vec![letter]
                }
            }
            NielsenGen::Swap(i, j) => {
                if letter.index() == i {
                    let swapped = Letter::generator(j);
                    vec![if letter.is_inverse() { swapped.inverse() } else { swapped }]
                } else if letter.index() == j {
                    let swapped = Letter::generator(i);
                    vec![if letter.is_inverse() { swapped.inverse() } else { swapped }]
                } else {
                    vec![letter]
                }
            }
            NielsenGen::RightMultiply(i, j) => {
                let gi = Letter::generator(i);
                let gj = Letter::generator(j);
                if letter == gi {
                    vec![gi, gj]
                } else if letter == gi.inverse() {
                    vec![gj.inverse(), gi.inverse()]
                } else {
                    vec![letter]
                }
            }
        }
    }

    /// Applies the move to a freely reduced word.
    pub fn apply(&self, word: &Word) -> Word {
        let mut letters = Vec::with_capacity(2 * word.len());
        for &l in word.letters() {
            letters.extend(self.map_letter(l));
        }
        free_reduce(&letters)
    }

    /// The inverse automorphism as a short sequence of Nielsen moves.
    /// Inverting and swapping are involutions; the inverse of a_i -> a_i·a_j
    /// is inv(j) · mul(i,j) · inv(j).
    pub fn inverse_gens(&self) -> Vec<NielsenGen> {
        match *self {
            NielsenGen::Invert(_) | NielsenGen::Swap(_, _) => vec![*self],
            NielsenGen::RightMultiply(i, j) => vec![
                NielsenGen::Invert(j),
                NielsenGen::RightMultiply(i, j),
                NielsenGen::Invert(j),
            ],
        }
    }

    pub fn parse(token: &str) -> Result<NielsenGen> {
        let parts: Vec<&str> = token.split(':').collect();
        let index = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad generator index {s:?} in {token:?}")))
        };
        match parts.as_slice() {
            ["inv", i] => Ok(NielsenGen::Invert(index(i)?)),
            ["swap", i, j] => Ok(NielsenGen::Swap(index(i)?, index(j)?)),
            ["mul", i, j] => Ok(NielsenGen::RightMultiply(index(i)?, index(j)?)),
            _ => Err(Error::Parse(format!(
                "unknown Nielsen token {token:?} (expected inv:i, swap:i:j or mul:i:j)"
            ))),
        }
    }
}

impl fmt::Display for NielsenGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NielsenGen::Invert(i) => write!(f, "inv:{i}"),
            NielsenGen::Swap(i, j) => write!(f, "swap:{i}:{j}"),
            NielsenGen::RightMultiply(i, j) => write!(f, "mul:{i}:{j}"),
        }
    }
}

/// An automorphism presented as a sequence of Nielsen moves, applied
/// left-to-right: the first move acts on the word first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NielsenWord {
    rank: usize,
    gens: Vec<NielsenGen>,
}

impl NielsenWord {
    pub fn new(rank: usize, gens: Vec<NielsenGen>) -> Result<Self> {
        Alphabet::new(rank)?;
        for gen in &gens {
            gen.validate(rank)?;
        }
        Ok(NielsenWord { rank, gens })
    }

    pub fn identity(rank: usize) -> Result<Self> {
        NielsenWord::new(rank, Vec::new())
    }

    /// Parses the whitespace-separated mini-language, e.g. `mul:1:2 inv:2`.
    /// The empty string is the identity.
    pub fn parse(rank: usize, text: &str) -> Result<Self> {
        let gens = text
            .split_whitespace()
            .map(NielsenGen::parse)
            .collect::<Result<Vec<_>>>()?;
        NielsenWord::new(rank, gens)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("rank validated at construction")
    }

    pub fn gens(&self) -> &[NielsenGen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// The composition "self first, then other".
    pub fn then(&self, other: &NielsenWord) -> Result<NielsenWord> {
        if self.rank != other.rank {
            return Err(Error::LevelMismatch(
                "composed automorphisms need equal rank".into(),
            ));
        }
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        NielsenWord::new(self.rank, gens)
    }

    pub fn inverse(&self) -> NielsenWord {
        let gens = self
            .gens
            .iter()
            .rev()
            .flat_map(NielsenGen::inverse_gens)
            .collect();
        NielsenWord { rank: self.rank, gens }
    }

    pub fn power(&self, n: usize) -> NielsenWord {
        let mut gens = Vec::with_capacity(self.gens.len() * n);
        for _ in 0..n {
            gens.extend_from_slice(&self.gens);
        }
        NielsenWord { rank: self.rank, gens }
    }

    pub fn apply(&self, word: &Word) -> Word {
        let mut current = word.clone();
        for gen in &self.gens {
            current = gen.apply(&current);
        }
        current
    }

    /// Image of a conjugacy class: cyclically reduced, canonical, and
    /// independent of the chosen representative.
    pub fn apply_cyclic(&self, word: &CyclicWord) -> CyclicWord {
        CyclicWord::from_word(&self.apply(&word.to_word()))
            .expect("automorphism image of a nontrivial class is nontrivial")
    }

    /// Images of the generators a_1..a_k.
    pub fn images(&self) -> Vec<Word> {
        (1..=self.rank)
            .map(|i| self.apply(&Word::single(Letter::generator(i))))
            .collect()
    }

    /// L(phi) = max over letters of the image length.
    pub fn max_image_len(&self) -> usize {
        self.images().iter().map(Word::len).max().unwrap_or(1).max(1)
    }
}

impl fmt::Display for NielsenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", tokens.join(" "))
    }
}

/// Caps for transfer-table construction.
#[derive(Debug, Clone, Copy)]
pub struct TransferBudget {
    pub max_patterns: usize,
    pub max_pattern_len: usize,
}

impl Default for TransferBudget {
    fn default() -> Self {
        TransferBudget { max_patterns: 500_000, max_pattern_len: 64 }
    }
}

/// Nominal window bound for a product of t Nielsen moves and target length m:
/// 2m+6 for one move, doubled plus 6 per further move (and m itself at t=0).
pub fn window_bound(t: usize, m: usize) -> u64 {
    let mut bound = m as u64;
    for _ in 0..t {
        bound = bound.saturating_mul(2).saturating_add(6);
    }
    bound
}

/// An exact occurrence-transfer table: for every cyclic word w the occurrence
/// count of `target` in the image of w equals the pattern-weighted sum of
/// occurrence counts of the stored patterns in w. Patterns of different
/// lengths stand for their padded length-`window_length` expansions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferTable {
    target: Word,
    window_length: u64,
    patterns: BTreeMap<Word, u64>,
}

impl TransferTable {
    pub fn target(&self) -> &Word {
        &self.target
    }

    #[cfg(test)]
    pub(crate) fn from_parts(target: Word, window_length: u64, patterns: BTreeMap<Word, u64>) -> Self {
        TransferTable { target, window_length, patterns }
    }

    pub fn window_length(&self) -> u64 {
        self.window_length
    }

    pub fn patterns(&self) -> &BTreeMap<Word, u64> {
        &self.patterns
    }

    pub fn max_pattern_len(&self) -> usize {
        self.patterns.keys().map(Word::len).max().unwrap_or(0)
    }

    /// Predicted occurrence count of the target in the image of w.
    pub fn predict(&self, w: &CyclicWord) -> u64 {
        self.patterns
            .iter()
            .map(|(p, mult)| mult * crate::words::count_occurrences(w, p))
            .sum()
    }

    /// The dense window coefficients c(v) over all words of length `level`,
    /// obtained by padding each pattern over its reduced extensions. Only
    /// sensible for small levels.
    pub fn materialize(&self, alphabet: &Alphabet, level: usize) -> Result<BTreeMap<Word, u64>> {
        if level < self.max_pattern_len() {
            return Err(Error::LevelMismatch(format!(
                "cannot materialize at level {level} below the longest pattern {}",
                self.max_pattern_len()
            )));
        }
        if alphabet.word_count(level) > 5_000_000 {
            return Err(Error::BudgetExceeded(format!(
                "materializing {} windows",
                alphabet.word_count(level)
            )));
        }
        let mut out = BTreeMap::new();
        for window in alphabet.words_of_length(level) {
            let c: u64 = self
                .patterns
                .iter()
                .filter(|(p, _)| window.starts_with(p))
                .map(|(_, mult)| *mult)
                .sum();
            if c > 0 {
                out.insert(window, c);
            }
        }
        Ok(out)
    }
}

/// Transfer table of a single Nielsen move for a nonempty target word.
pub fn transfer_table(alphabet: &Alphabet, gen: &NielsenGen, u: &Word) -> Result<TransferTable> {
    if u.is_empty() {
        return Err(Error::Parse("transfer target must be nonempty".into()));
    }
    gen.validate(alphabet.rank())?;
    Ok(TransferTable {
        target: u.clone(),
        window_length: window_bound(1, u.len()),
        patterns: generator_patterns(alphabet, gen, u),
    })
}

/// Transfer table of a composition of Nielsen moves, built by expanding the
/// outermost move's table through the remaining composition.
pub fn compose_transfer(auto: &NielsenWord, u: &Word) -> Result<TransferTable> {
    compose_transfer_with_budget(auto, u, TransferBudget::default())
}

pub fn compose_transfer_with_budget(
    auto: &NielsenWord,
    u: &Word,
    budget: TransferBudget,
) -> Result<TransferTable> {
    if u.is_empty() {
        return Err(Error::Parse("transfer target must be nonempty".into()));
    }
    let mut builder = TableBuilder::new(auto, budget);
    let patterns = builder.compose(auto.len(), u)?;
    Ok(TransferTable {
        target: u.clone(),
        window_length: window_bound(auto.len(), u.len()),
        patterns: (*patterns).clone(),
    })
}

/// Window coefficients expressing the image length: for every cyclic word w,
/// the cyclic length of the image of w is the weighted sum of pattern counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthWeights {
    window_length: u64,
    weights: BTreeMap<Word, u64>,
}

impl LengthWeights {
    pub fn window_length(&self) -> u64 {
        self.window_length
    }

    pub fn weights(&self) -> &BTreeMap<Word, u64> {
        &self.weights
    }

    pub fn max_pattern_len(&self) -> usize {
        self.weights.keys().map(Word::len).max().unwrap_or(1)
    }

    pub fn predict_length(&self, w: &CyclicWord) -> u64 {
        self.weights
            .iter()
            .map(|(p, mult)| mult * crate::words::count_occurrences(w, p))
            .sum()
    }
}

/// Length weights of an automorphism: the merged transfer tables of all
/// single-letter targets. The identity yields indicator weights on letters.
pub fn length_weights(auto: &NielsenWord) -> Result<LengthWeights> {
    length_weights_with_budget(auto, TransferBudget::default())
}

pub fn length_weights_with_budget(
    auto: &NielsenWord,
    budget: TransferBudget,
) -> Result<LengthWeights> {
    let alphabet = auto.alphabet();
    let mut builder = TableBuilder::new(auto, budget);
    let mut weights: BTreeMap<Word, u64> = BTreeMap::new();
    for letter in alphabet.letters() {
        let table = builder.compose(auto.len(), &Word::single(letter))?;
        for (pattern, mult) in table.iter() {
            let entry = weights.entry(pattern.clone()).or_insert(0);
            *entry = entry.checked_add(*mult).ok_or_else(|| {
                Error::BudgetExceeded("length weight multiplicity overflow".into())
            })?;
        }
    }
    Ok(LengthWeights {
        window_length: window_bound(auto.len(), 1),
        weights,
    })
}

/// The induced action on frequency vectors: every level-m coordinate of the
/// image is a ratio of pattern marginals with the common positive denominator
/// given by the length weights.
pub fn act_on_frequencies(
    auto: &NielsenWord,
    q: &FrequencyVector,
    m: usize,
) -> Result<FrequencyVector> {
    assert!(m >= 1);
    if q.rank() != auto.rank() {
        return Err(Error::LevelMismatch(
            "vector rank differs from automorphism rank".into(),
        ));
    }
    if let Some(violation) = q.membership_violation() {
        return Err(Error::NotInPolytope(violation));
    }
    let alphabet = auto.alphabet();
    let budget = TransferBudget::default();
    let mut builder = TableBuilder::new(auto, budget);
    let length = length_weights_with_budget(auto, budget)?;
    let mut tables: Vec<(Word, Rc<BTreeMap<Word, u64>>)> = Vec::new();
    let mut required = length.max_pattern_len();
    for target in alphabet.words_of_length(m) {
        let table = builder.compose(auto.len(), &target)?;
        required = required.max(table.keys().map(Word::len).max().unwrap_or(0));
        tables.push((target, table));
    }
    if q.level() < required {
        return Err(Error::LevelMismatch(format!(
            "vector level {} is below the required window {required}",
            q.level()
        )));
    }
    let weighted_marginal = |patterns: &BTreeMap<Word, u64>| -> Rational {
        patterns
            .iter()
            .map(|(p, mult)| {
                Rational::from(num_bigint::BigInt::from(*mult)) * q.prefix_marginal(p)
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    };
    let denominator = weighted_marginal(&length.weights);
    if !denominator.is_positive() {
        return Err(Error::InvariantViolation(
            "length denominator is not positive on a polytope point".into(),
        ));
    }
    let mut entries = BTreeMap::new();
    for (target, table) in tables {
        let numerator = weighted_marginal(&table);
        if !numerator.is_zero() {
            entries.insert(target, numerator / &denominator);
        }
    }
    let image = FrequencyVector::from_validated(auto.rank(), m, entries);
    debug_assert!(image.check_membership());
    Ok(image)
}

/// Builder with memoization across targets of one composition.
struct TableBuilder<'a> {
    alphabet: Alphabet,
    gens: &'a [NielsenGen],
    budget: TransferBudget,
    memo: HashMap<(usize, Word), Rc<BTreeMap<Word, u64>>>,
}

impl<'a> TableBuilder<'a> {
    fn new(auto: &'a NielsenWord, budget: TransferBudget) -> Self {
        TableBuilder {
            alphabet: auto.alphabet(),
            gens: &auto.gens,
            budget,
            memo: HashMap::new(),
        }
    }

    /// Patterns expressing the count of `u` in the image under the first
    /// `depth` moves (applied left-to-right).
    fn compose(&mut self, depth: usize, u: &Word) -> Result<Rc<BTreeMap<Word, u64>>> {
        if depth == 0 {
            return Ok(Rc::new([(u.clone(), 1u64)].into_iter().collect()));
        }
        if let Some(hit) = self.memo.get(&(depth, u.clone())) {
            return Ok(hit.clone());
        }
        // The last-applied move is peeled first.
        let outer = &self.gens[depth - 1];
        let first = generator_patterns(&self.alphabet, outer, u);
        let mut acc: BTreeMap<Word, u64> = BTreeMap::new();
        for (pattern, mult) in first {
            let inner = self.compose(depth - 1, &pattern)?;
            for (deep, deep_mult) in inner.iter() {
                let product = mult.checked_mul(*deep_mult).ok_or_else(|| {
                    Error::BudgetExceeded("transfer multiplicity overflow".into())
                })?;
                let entry = acc.entry(deep.clone()).or_insert(0);
                *entry = entry.checked_add(product).ok_or_else(|| {
                    Error::BudgetExceeded("transfer multiplicity overflow".into())
                })?;
            }
            if acc.len() > self.budget.max_patterns {
                return Err(Error::BudgetExceeded(format!(
                    "transfer table exceeds {} patterns",
                    self.budget.max_patterns
                )));
            }
        }
        if let Some(longest) = acc.keys().map(Word::len).max() {
            if longest > self.budget.max_pattern_len {
                return Err(Error::BudgetExceeded(format!(
                    "transfer pattern length {longest} exceeds cap {}",
                    self.budget.max_pattern_len
                )));
            }
        }
        let shared = Rc::new(acc);
        self.memo.insert((depth, u.clone()), shared.clone());
        Ok(shared)
    }
}

/// Patterns for a single Nielsen move. Swaps and inversions permute the
/// letters, so the count of u in the image is the count of the preimage of u.
fn generator_patterns(alphabet: &Alphabet, gen: &NielsenGen, u: &Word) -> BTreeMap<Word, u64> {
    match gen {
        NielsenGen::Invert(_) | NielsenGen::Swap(_, _) => {
            // involutions: the inverse is the move itself
            [(gen.apply(u), 1u64)].into_iter().collect()
        }
        NielsenGen::RightMultiply(i, j) => {
            let ctx = MulContext::new(alphabet, *i, *j);
            ctx.patterns(u)
        }
    }
}

/// Pattern derivation for a_i -> a_i·a_j by windowed attribution. Every
/// occurrence of the target in the image of a cyclic word starts inside the
/// image block of a unique source letter; the DFS walks source extensions of
/// that anchor letter, tracking the surviving block letters. Junction
/// cancellation is local: exactly the source pairs (a_i, a_j^{-1}) and
/// (a_j, a_i^{-1}) cancel one letter pair, and cancellations never cascade.
struct MulContext {
    gi: Letter,
    gj: Letter,
    letters: Vec<Letter>,
}

impl MulContext {
    fn new(alphabet: &Alphabet, i: usize, j: usize) -> Self {
        MulContext {
            gi: Letter::generator(i),
            gj: Letter::generator(j),
            letters: alphabet.letters().collect(),
        }
    }

    fn block(&self, y: Letter) -> Vec<Letter> {
        if y == self.gi {
            vec![self.gi, self.gj]
        } else if y == self.gi.inverse() {
            vec![self.gj.inverse(), self.gi.inverse()]
        } else {
            vec![y]
        }
    }

    /// The left neighbor that erases the first letter of block(y), if any.
    fn left_canceller(&self, y: Letter) -> Option<Letter> {
        if y == self.gj.inverse() {
            Some(self.gi)
        } else if y == self.gi.inverse() {
            Some(self.gj)
        } else {
            None
        }
    }

    /// The right neighbor that erases the last letter of block(y), if any.
    fn right_canceller(&self, y: Letter) -> Option<Letter> {
        if y == self.gi {
            Some(self.gj.inverse())
        } else if y == self.gj {
            Some(self.gi.inverse())
        } else {
            None
        }
    }

    fn patterns(&self, u: &Word) -> BTreeMap<Word, u64> {
        let mut out = BTreeMap::new();
        for &anchor in &self.letters {
            // Cases for the unknown left neighbor of the anchor: it matters
            // only when it can erase the anchor block's first letter, and
            // then the neighbor letter becomes part of the pattern.
            let mut cases: Vec<(Option<Letter>, bool)> = Vec::new();
            if let Some(canceller) = self.left_canceller(anchor) {
                cases.push((Some(canceller), true));
                for &x in &self.letters {
                    if x != canceller && x != anchor.inverse() {
                        cases.push((Some(x), false));
                    }
                }
            } else {
                cases.push((None, false));
            }
            for (prefix, first_cut) in cases {
                let mut content = self.block(anchor);
                if first_cut {
                    content.remove(0);
                }
                if content.is_empty() {
                    continue;
                }
                for start in 0..content.len() {
                    let mut pattern = vec![anchor];
                    self.step(u, prefix, &mut pattern, &content, start, 0, &mut out);
                }
            }
        }
        out
    }

    /// Continues matching u inside the block of the last pattern letter.
    /// `content` is that block after the known left junction; its final
    /// letter is provisional when it can still be erased from the right.
    /// `pos` is the block position where matching resumes.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &self,
        u: &Word,
        prefix: Option<Letter>,
        pattern: &mut Vec<Letter>,
        content: &[Letter],
        pos: usize,
        matched: usize,
        out: &mut BTreeMap<Word, u64>,
    ) {
        debug_assert!(
            pattern.len() <= 2 * u.len() + 2,
            "pattern grew past the span bound"
        );
        let cur = *pattern.last().unwrap();
        let right = self.right_canceller(cur);
        let stable_len = if right.is_some() { content.len() - 1 } else { content.len() };
        let target = u.letters();
        let mut pos = pos;
        let mut matched = matched;
        while pos < stable_len && matched < target.len() {
            if content[pos] == target[matched] {
                pos += 1;
                matched += 1;
            } else {
                return;
            }
        }
        if matched == target.len() {
            // completed strictly inside the stable part: the next source
            // letter is irrelevant
            self.emit(prefix, pattern, out);
            return;
        }
        let Some(canceller) = right else {
            // block exhausted with nothing provisional: extend the source
            for &y in &self.letters {
                if y == cur.inverse() {
                    continue;
                }
                pattern.push(y);
                self.step(u, prefix, pattern, &self.block(y), 0, matched, out);
                pattern.pop();
            }
            return;
        };
        // Survive branch: the provisional letter stays because the next
        // source letter is not the canceller.
        let provisional = *content.last().unwrap();
        if provisional == target[matched] {
            let matched_after = matched + 1;
            for &y in &self.letters {
                if y == canceller || y == cur.inverse() {
                    continue;
                }
                pattern.push(y);
                if matched_after == target.len() {
                    self.emit(prefix, pattern, out);
                } else {
                    self.step(u, prefix, pattern, &self.block(y), 0, matched_after, out);
                }
                pattern.pop();
            }
        }
        // Cancel branch: the next source letter is the canceller; the
        // provisional letter and the canceller block's first letter vanish.
        // Dead when the occurrence was supposed to start at the erased
        // letter of the anchor block.
        if !(pattern.len() == 1 && matched == 0) {
            debug_assert!(canceller != cur.inverse());
            let mut content_next = self.block(canceller);
            content_next.remove(0);
            pattern.push(canceller);
            self.step(u, prefix, pattern, &content_next, 0, matched, out);
            pattern.pop();
        }
    }

    fn emit(&self, prefix: Option<Letter>, pattern: &[Letter], out: &mut BTreeMap<Word, u64>) {
        let mut letters = Vec::with_capacity(pattern.len() + 1);
        if let Some(x) = prefix {
            letters.push(x);
        }
        letters.extend_from_slice(pattern);
        *out.entry(Word::from_reduced(letters)).or_insert(0) += 1;
    }
}

/// Shared helpers for the crate's unit tests.
#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::Rng;

    pub(crate) fn random_auto(rng: &mut impl Rng, rank: usize, len: usize) -> NielsenWord {
        let mut gens = Vec::with_capacity(len);
        for _ in 0..len {
            let i = rng.random_range(1..=rank);
            let mut j = rng.random_range(1..=rank - 1);
            if j >= i {
                j += 1;
            }
            gens.push(match rng.random_range(0..3) {
                0 => NielsenGen::Invert(i),
                1 => NielsenGen::Swap(i, j),
                _ => NielsenGen::RightMultiply(i, j),
            });
        }
        NielsenWord::new(rank, gens).unwrap()
    }
}
