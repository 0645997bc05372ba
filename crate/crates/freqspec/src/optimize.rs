//! Exact optimization of length-transfer functionals over the frequency
//! polytopes: conjugacy distortion extremes with witness words, the
//! hyperbolicity constant, distortion-ratio realization, and the
//! hyperbolicity semi-decision.

use crate::automorphism::{
    length_weights_with_budget, window_bound, LengthWeights, NielsenWord, TransferBudget,
};
use crate::error::{Error, Result};
use crate::polytope::{interior_perturb, FrequencyVector};
use crate::words::{Alphabet, CyclicWord, Letter, Word};
use crate::{simplex, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::time::Instant;

/// Caps for the optimization stage.
#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    /// Cap on the number of graph vertices D(level-1).
    pub vertex_budget: u128,
    /// Caps for transfer-table construction.
    pub transfer: TransferBudget,
    /// Cap on the coordinate count D(level) for the simplex backend.
    pub lp_variable_budget: u128,
    /// Cap on constructed witness word lengths.
    pub witness_cap: u64,
    /// Certified gap tolerance for hyperbolicity-constant witnesses.
    pub lambda_gap: Rational,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            vertex_budget: 10_000_000,
            transfer: TransferBudget::default(),
            lp_variable_budget: 400,
            witness_cap: 1_000_000,
            lambda_gap: Rational::new(BigInt::one(), BigInt::from(1000)),
        }
    }
}

/// The affine length functional attached to a weight table, evaluated on a
/// polytope point by prefix marginals.
pub fn length_functional(weights: &LengthWeights, q: &FrequencyVector) -> Rational {
    weights
        .weights()
        .iter()
        .map(|(p, mult)| Rational::from(BigInt::from(*mult)) * q.prefix_marginal(p))
        .fold(Rational::zero(), |acc, v| acc + v)
}

/// The word graph at a fixed level: vertices are reduced words of length
/// level-1 indexed arithmetically, edges append one non-cancelling letter.
/// Nothing per-edge is materialized except weight arrays.
pub struct LevelGraph {
    alphabet: Alphabet,
    level: usize,
    vertex_count: usize,
    branch: usize,
    high_pow: usize,
    mid_pow: usize,
    last_code: Vec<u8>,
}

impl LevelGraph {
    pub fn new(alphabet: &Alphabet, level: usize, vertex_budget: u128) -> Result<Self> {
        assert!(level >= 2);
        let vertex_count_big = alphabet.word_count(level - 1);
        if vertex_count_big > vertex_budget {
            return Err(Error::BudgetExceeded(format!(
                "level {level} needs {vertex_count_big} vertices, budget is {vertex_budget} \
                 (window sizes grow doubly exponentially in the move count)"
            )));
        }
        let vertex_count = usize::try_from(vertex_count_big)
            .map_err(|_| Error::BudgetExceeded("vertex count exceeds address space".into()))?;
        let branch = 2 * alphabet.rank() - 1;
        let n = level - 1;
        let high_pow = branch.pow((n - 1) as u32);
        let mid_pow = if n >= 2 { branch.pow((n - 2) as u32) } else { 1 };
        let mut last_code = vec![0u8; vertex_count];
        {
            // enumeration order coincides with index order
            fn fill(
                alphabet: &Alphabet,
                n: usize,
                stack: &mut Vec<Letter>,
                idx: &mut usize,
                last_code: &mut [u8],
            ) {
                if stack.len() == n {
                    last_code[*idx] = stack.last().unwrap().canonical_code() as u8;
                    *idx += 1;
                    return;
                }
                for letter in alphabet.letters() {
                    if let Some(&prev) = stack.last() {
                        if letter == prev.inverse() {
                            continue;
                        }
                    }
                    stack.push(letter);
                    fill(alphabet, n, stack, idx, last_code);
                    stack.pop();
                }
            }
            let mut idx = 0usize;
            let mut stack: Vec<Letter> = Vec::with_capacity(n);
            fill(alphabet, n, &mut stack, &mut idx, &mut last_code);
            debug_assert_eq!(idx, vertex_count);
        }
        Ok(LevelGraph {
            alphabet: *alphabet,
            level,
            vertex_count,
            branch,
            high_pow,
            mid_pow,
            last_code,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn branch(&self) -> usize {
        self.branch
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_count * self.branch
    }

    /// Canonical code of the letter following a letter of code `prev` when
    /// the successor digit is `r` (successors skip the inverse letter).
    #[inline]
    fn decode(prev: usize, r: usize) -> usize {
        let inverse = prev ^ 1;
        r + usize::from(r >= inverse)
    }

    /// Target vertex of the edge (v, r).
    #[inline]
    pub fn step(&self, v: usize, r: usize) -> usize {
        let n = self.level - 1;
        if n == 1 {
            return Self::decode(v, r);
        }
        let c1 = v / self.high_pow;
        let rest = v % self.high_pow;
        let r2 = rest / self.mid_pow;
        let tail = rest % self.mid_pow;
        let c2 = Self::decode(c1, r2);
        c2 * self.high_pow + tail * self.branch + r
    }

    /// The letter appended by the edge (v, r).
    #[inline]
    pub fn edge_letter(&self, v: usize, r: usize) -> Letter {
        Letter::from_canonical_code(Self::decode(self.last_code[v] as usize, r))
    }

    /// Reconstructs the word of a vertex index.
    pub fn vertex_word(&self, v: usize) -> Word {
        let n = self.level - 1;
        let mut letters = Vec::with_capacity(n);
        let mut power = self.high_pow;
        let mut code = v / power;
        let mut rest = v % power;
        letters.push(Letter::from_canonical_code(code));
        for _ in 1..n {
            power /= self.branch;
            let r = rest / power;
            rest %= power;
            code = Self::decode(code, r);
            letters.push(Letter::from_canonical_code(code));
        }
        Word::from_reduced(letters)
    }

    /// The length-level word of the edge (v, r).
    pub fn edge_word(&self, v: usize, r: usize) -> Word {
        let mut letters = self.vertex_word(v).letters().to_vec();
        letters.push(self.edge_letter(v, r));
        Word::from_reduced(letters)
    }

    /// Edge weights: the multiplicity sum of table patterns prefixing each
    /// edge word, laid out flat as v*branch + r.
    pub fn edge_weights(&self, patterns: &BTreeMap<Word, u64>) -> Result<Vec<i64>> {
        let trie = Trie::build(self.alphabet.letter_count(), patterns)?;
        let mut weights = vec![0i64; self.edge_count()];
        let n = self.level - 1;
        #[allow(clippy::too_many_arguments)]
        fn fill(
            graph: &LevelGraph,
            trie: &Trie,
            depth: usize,
            n: usize,
            prev_code: usize,
            node: Option<usize>,
            acc: i64,
            idx: usize,
            weights: &mut [i64],
        ) {
            if depth == n {
                for r in 0..graph.branch {
                    let code = LevelGraph::decode(prev_code, r);
                    let child = node.and_then(|id| trie.child(id, code));
                    let extra = child.map_or(0, |id| trie.weight(id));
                    weights[idx * graph.branch + r] = acc + extra;
                }
                return;
            }
            for code in 0..graph.alphabet.letter_count() {
                let (advance, slot) = if depth == 0 {
                    (true, code)
                } else if code != prev_code ^ 1 {
                    let r = code - usize::from(code > (prev_code ^ 1));
                    (true, idx * graph.branch + r)
                } else {
                    (false, 0)
                };
                if !advance {
                    continue;
                }
                let child = if depth == 0 {
                    trie.child(trie.root(), code)
                } else {
                    node.and_then(|id| trie.child(id, code))
                };
                let extra = child.map_or(0, |id| trie.weight(id));
                fill(graph, trie, depth + 1, n, code, child, acc + extra, slot, weights);
            }
        }
        fill(self, &trie, 0, n, usize::MAX, None, 0, 0, &mut weights);
        Ok(weights)
    }

    /// Reads the cyclic word traced by a closed edge path (the last letter of
    /// each edge, in order).
    pub fn cycle_word(&self, cycle: &[(usize, usize)]) -> CyclicWord {
        let letters: Vec<Letter> = cycle.iter().map(|&(v, r)| self.edge_letter(v, r)).collect();
        CyclicWord::new(&Word::from_reduced(letters)).expect("cycles are nonempty")
    }

    /// The uniform polytope point supported on a simple cycle.
    pub fn cycle_vector(&self, cycle: &[(usize, usize)]) -> FrequencyVector {
        let share = Rational::new(BigInt::one(), BigInt::from(cycle.len() as u64));
        let entries: BTreeMap<Word, Rational> = cycle
            .iter()
            .map(|&(v, r)| (self.edge_word(v, r), share.clone()))
            .collect();
        FrequencyVector::new(self.alphabet.rank(), self.level, entries)
            .expect("cycle edges are valid level words")
    }
}

/// Prefix trie over patterns with per-node terminal weights.
struct Trie {
    letter_count: usize,
    children: Vec<u32>,
    weights: Vec<i64>,
}

const TRIE_NONE: u32 = u32::MAX;

impl Trie {
    fn build(letter_count: usize, patterns: &BTreeMap<Word, u64>) -> Result<Self> {
        let mut trie = Trie {
            letter_count,
            children: vec![TRIE_NONE; letter_count],
            weights: vec![0],
        };
        for (pattern, mult) in patterns {
            let mut node = 0usize;
            for &letter in pattern.letters() {
                let slot = node * letter_count + letter.canonical_code();
                if trie.children[slot] == TRIE_NONE {
                    let fresh = trie.weights.len();
                    trie.children[slot] = fresh as u32;
                    trie.weights.push(0);
                    trie.children
                        .extend(std::iter::repeat(TRIE_NONE).take(letter_count));
                    node = fresh;
                } else {
                    node = trie.children[slot] as usize;
                }
            }
            let mult = i64::try_from(*mult)
                .map_err(|_| Error::BudgetExceeded("pattern multiplicity overflow".into()))?;
            trie.weights[node] = trie.weights[node]
                .checked_add(mult)
                .ok_or_else(|| Error::BudgetExceeded("pattern weight overflow".into()))?;
        }
        Ok(trie)
    }

    fn root(&self) -> usize {
        0
    }

    fn child(&self, node: usize, code: usize) -> Option<usize> {
        let slot = self.children[node * self.letter_count + code];
        (slot != TRIE_NONE).then_some(slot as usize)
    }

    fn weight(&self, node: usize) -> i64 {
        self.weights[node]
    }
}

/// A mean-optimal simple cycle as (vertex, successor-digit) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub edges: Vec<(usize, usize)>,
    pub mean: Rational,
}

fn weight_guard(graph: &LevelGraph, weights: &[i64]) -> Result<()> {
    let max_abs = weights.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0);
    let bound = (graph.vertex_count as u128 + 2) * (max_abs as u128 + 1);
    if bound > (i64::MAX / 8) as u128 {
        return Err(Error::BudgetExceeded(
            "edge weights too large for exact path sums".into(),
        ));
    }
    Ok(())
}

fn cycle_total(cycle: &[(usize, usize)], weights: &[i64], branch: usize) -> i64 {
    cycle.iter().map(|&(v, r)| weights[v * branch + r]).sum()
}

/// Minimum mean-weight directed cycle by the classical two-pass
/// length-indexed dynamic program; the witness cycle is recovered from the
/// tight subgraph of potential-adjusted weights.
pub fn min_mean_cycle(graph: &LevelGraph, weights: &[i64]) -> Result<MeanCycle> {
    weight_guard(graph, weights)?;
    let v_count = graph.vertex_count;
    let branch = graph.branch;
    let inf = i64::MAX / 4;

    let relax = |from: &[i64], to: &mut [i64]| {
        to.fill(inf);
        for v in 0..v_count {
            let base = from[v];
            if base >= inf {
                continue;
            }
            let row = v * branch;
            for r in 0..branch {
                let t = graph.step(v, r);
                let cand = base + weights[row + r];
                if cand < to[t] {
                    to[t] = cand;
                }
            }
        }
    };

    // pass 1: minimal walk weights of length exactly v_count
    let mut prev = vec![inf; v_count];
    prev[0] = 0;
    let mut cur = vec![inf; v_count];
    for _ in 0..v_count {
        relax(&prev, &mut cur);
        std::mem::swap(&mut prev, &mut cur);
    }
    let full = prev.clone();

    // pass 2: stream rows k = 0..v_count-1 and track the inner maximum
    let mut best_num = vec![0i64; v_count];
    let mut best_den = vec![0i64; v_count];
    prev.fill(inf);
    prev[0] = 0;
    for k in 0..v_count {
        for v in 0..v_count {
            if prev[v] < inf && full[v] < inf {
                let num = full[v] - prev[v];
                let den = (v_count - k) as i64;
                if best_den[v] == 0
                    || (num as i128) * (best_den[v] as i128)
                        > (best_num[v] as i128) * (den as i128)
                {
                    best_num[v] = num;
                    best_den[v] = den;
                }
            }
        }
        if k + 1 < v_count {
            relax(&prev, &mut cur);
            std::mem::swap(&mut prev, &mut cur);
        }
    }
    let mut value: Option<(i64, i64)> = None;
    for v in 0..v_count {
        if full[v] >= inf || best_den[v] == 0 {
            continue;
        }
        let better = match value {
            None => true,
            Some((num, den)) => {
                (best_num[v] as i128) * (den as i128) < (num as i128) * (best_den[v] as i128)
            }
        };
        if better {
            value = Some((best_num[v], best_den[v]));
        }
    }
    let (num, den) = value.ok_or_else(|| {
        Error::InvariantViolation("no cycle reachable in a strongly connected graph".into())
    })?;

    // witness: shortest-path potentials for den*w - num, then any cycle of
    // tight edges
    let adjusted: Vec<i64> = weights.iter().map(|w| den * w - num).collect();
    let mut dist = vec![inf; v_count];
    dist[0] = 0;
    let mut rounds = 0usize;
    loop {
        let mut changed = false;
        for v in 0..v_count {
            let base = dist[v];
            if base >= inf {
                continue;
            }
            let row = v * branch;
            for r in 0..branch {
                let t = graph.step(v, r);
                let cand = base + adjusted[row + r];
                if cand < dist[t] {
                    dist[t] = cand;
                    changed = true;
                }
            }
        }
        rounds += 1;
        if !changed {
            break;
        }
        if rounds > v_count + 1 {
            return Err(Error::InvariantViolation(
                "negative cycle under mean-adjusted weights".into(),
            ));
        }
    }
    let cycle = find_tight_cycle(graph, &adjusted, &dist, inf)?;
    let mean = Rational::new(BigInt::from(num), BigInt::from(den));
    debug_assert_eq!(
        Rational::new(
            BigInt::from(cycle_total(&cycle, weights, branch)),
            BigInt::from(cycle.len() as i64)
        ),
        mean
    );
    Ok(MeanCycle { edges: cycle, mean })
}

/// Maximum mean cycle via negation.
pub fn max_mean_cycle(graph: &LevelGraph, weights: &[i64]) -> Result<MeanCycle> {
    let negated: Vec<i64> = weights.iter().map(|w| -w).collect();
    let result = min_mean_cycle(graph, &negated)?;
    Ok(MeanCycle { edges: result.edges, mean: -result.mean })
}

/// Finds a directed cycle among edges with zero potential-adjusted weight.
fn find_tight_cycle(
    graph: &LevelGraph,
    adjusted: &[i64],
    dist: &[i64],
    inf: i64,
) -> Result<Vec<(usize, usize)>> {
    let v_count = graph.vertex_count;
    let branch = graph.branch;
    let tight = |v: usize, r: usize| -> Option<usize> {
        if dist[v] >= inf {
            return None;
        }
        let t = graph.step(v, r);
        (dist[v] + adjusted[v * branch + r] == dist[t]).then_some(t)
    };
    let mut color = vec![0u8; v_count];
    for root in 0..v_count {
        if color[root] != 0 {
            continue;
        }
        // frames: (vertex, next digit to try)
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&(v, r)) = frames.last() {
            if r == branch {
                frames.pop();
                color[v] = 2;
                continue;
            }
            frames.last_mut().unwrap().1 += 1;
            let Some(t) = tight(v, r) else { continue };
            match color[t] {
                0 => {
                    color[t] = 1;
                    frames.push((t, 0));
                }
                1 => {
                    // unwind the stack from t; taken digits are one behind
                    // the stored cursor
                    let start = frames.iter().position(|&(u, _)| u == t).unwrap();
                    let mut cycle: Vec<(usize, usize)> = frames[start..]
                        .windows(2)
                        .map(|pair| (pair[0].0, pair[0].1 - 1))
                        .collect();
                    cycle.push((v, r));
                    return Ok(cycle);
                }
                _ => {}
            }
        }
    }
    Err(Error::InvariantViolation(
        "tight subgraph of an optimal mean has no cycle".into(),
    ))
}

/// An exact distortion extreme together with a witness class achieving it.
#[derive(Debug, Clone)]
pub struct ExtremeReport {
    pub value: Rational,
    pub witness: CyclicWord,
    pub level: usize,
}

/// The supremum of image-length distortion over nontrivial classes.
pub fn nu_plus(auto: &NielsenWord) -> Result<ExtremeReport> {
    nu_plus_with(auto, &OptimizeOptions::default())
}

pub fn nu_plus_with(auto: &NielsenWord, options: &OptimizeOptions) -> Result<ExtremeReport> {
    nu_extreme(auto, true, options)
}

/// The infimum of image-length distortion over nontrivial classes.
pub fn nu_minus(auto: &NielsenWord) -> Result<ExtremeReport> {
    nu_minus_with(auto, &OptimizeOptions::default())
}

pub fn nu_minus_with(auto: &NielsenWord, options: &OptimizeOptions) -> Result<ExtremeReport> {
    nu_extreme(auto, false, options)
}

fn nu_extreme(
    auto: &NielsenWord,
    maximize: bool,
    options: &OptimizeOptions,
) -> Result<ExtremeReport> {
    let weights = length_weights_with_budget(auto, options.transfer)?;
    let level = weights.max_pattern_len().max(2);
    let graph = LevelGraph::new(&auto.alphabet(), level, options.vertex_budget)?;
    let array = graph.edge_weights(weights.weights())?;
    let cycle = if maximize {
        max_mean_cycle(&graph, &array)?
    } else {
        min_mean_cycle(&graph, &array)?
    };
    let witness = graph.cycle_word(&cycle.edges);
    let achieved = Rational::new(
        BigInt::from(auto.apply_cyclic(&witness).len() as u64),
        BigInt::from(witness.len() as u64),
    );
    if achieved != cycle.mean {
        return Err(Error::InvariantViolation(format!(
            "witness {witness} achieves {achieved}, solver reported {}",
            cycle.mean
        )));
    }
    Ok(ExtremeReport { value: cycle.mean, witness, level })
}

/// The hyperbolicity constant with its witness information.
#[derive(Debug, Clone)]
pub struct Lambda0Report {
    pub value: Rational,
    pub level: usize,
    /// True when an exact minimizing class was constructed (connected
    /// minimizer support); the witness gap is then zero.
    pub attained: bool,
    /// A class whose two-sided distortion exceeds the value by at most the
    /// stated certified gap. Absent when the witness construction would
    /// exceed the word-length cap.
    pub witness: Option<(CyclicWord, Rational)>,
}

enum Minimizer {
    Single(Vec<(usize, usize)>),
    Pair {
        low: Vec<(usize, usize)>,
        high: Vec<(usize, usize)>,
        mix: Rational,
    },
}

struct SupportLine {
    forward_mean: Rational,
    backward_mean: Rational,
    cycle: Vec<(usize, usize)>,
}

impl SupportLine {
    fn slope(&self) -> Rational {
        &self.forward_mean - &self.backward_mean
    }

    fn at(&self, theta: &Rational) -> Rational {
        theta * &self.forward_mean + (Rational::one() - theta) * &self.backward_mean
    }
}

/// The infimum over nontrivial classes of the two-sided distortion
/// max(forward, backward), computed by exact parametric search over convex
/// combinations of the two weight functionals.
pub fn lambda0(auto: &NielsenWord) -> Result<Lambda0Report> {
    lambda0_with(auto, &OptimizeOptions::default())
}

pub fn lambda0_with(auto: &NielsenWord, options: &OptimizeOptions) -> Result<Lambda0Report> {
    let inverse = auto.inverse();
    let forward = length_weights_with_budget(auto, options.transfer)?;
    let backward = length_weights_with_budget(&inverse, options.transfer)?;
    let level = forward
        .max_pattern_len()
        .max(backward.max_pattern_len())
        .max(2);
    let graph = LevelGraph::new(&auto.alphabet(), level, options.vertex_budget)?;
    let wf = graph.edge_weights(forward.weights())?;
    let wb = graph.edge_weights(backward.weights())?;

    let evaluate = |theta: &Rational| -> Result<SupportLine> {
        let num = theta
            .numer()
            .to_i64()
            .ok_or_else(|| Error::BudgetExceeded("parametric weight overflow".into()))?;
        let den = theta
            .denom()
            .to_i64()
            .ok_or_else(|| Error::BudgetExceeded("parametric weight overflow".into()))?;
        let combined: Vec<i64> = wf
            .iter()
            .zip(&wb)
            .map(|(f, b)| {
                num.checked_mul(*f)
                    .zip((den - num).checked_mul(*b))
                    .and_then(|(x, y)| x.checked_add(y))
                    .ok_or_else(|| Error::BudgetExceeded("parametric weight overflow".into()))
            })
            .collect::<Result<_>>()?;
        let cycle = min_mean_cycle(&graph, &combined)?;
        let len = BigInt::from(cycle.edges.len() as u64);
        Ok(SupportLine {
            forward_mean: Rational::new(
                BigInt::from(cycle_total(&cycle.edges, &wf, graph.branch)),
                len.clone(),
            ),
            backward_mean: Rational::new(
                BigInt::from(cycle_total(&cycle.edges, &wb, graph.branch)),
                len,
            ),
            cycle: cycle.edges,
        })
    };

    let low = evaluate(&Rational::zero())?;
    let high = evaluate(&Rational::one())?;
    let (value, minimizer) = if low.slope() <= Rational::zero() {
        (low.backward_mean.clone(), Minimizer::Single(low.cycle))
    } else if high.slope() >= Rational::zero() {
        (high.forward_mean.clone(), Minimizer::Single(high.cycle))
    } else {
        parametric_peak(low, high, evaluate)?
    };

    let (attained, witness) =
        lambda_witness(auto, &graph, &forward, &backward, &value, minimizer, options)?;
    Ok(Lambda0Report { value, level, attained, witness })
}

/// Newton-style search for the peak of the concave lower envelope.
fn parametric_peak(
    mut low: SupportLine,
    mut high: SupportLine,
    evaluate: impl Fn(&Rational) -> Result<SupportLine>,
) -> Result<(Rational, Minimizer)> {
    for _ in 0..10_000 {
        let denom = low.slope() - high.slope();
        debug_assert!(denom.is_positive());
        let theta = (&high.backward_mean - &low.backward_mean) / &denom;
        let cross = low.at(&theta);
        debug_assert_eq!(cross, high.at(&theta));
        let mid = evaluate(&theta)?;
        let mid_value = mid.at(&theta);
        if mid_value == cross {
            // the two support lines meet at the optimum: mix their cycles so
            // both functionals agree there
            let mix = (&high.backward_mean - &high.forward_mean) / &denom;
            return Ok((
                cross,
                Minimizer::Pair { low: low.cycle, high: high.cycle, mix },
            ));
        }
        let slope = mid.slope();
        if slope.is_zero() {
            return Ok((mid_value, Minimizer::Single(mid.cycle)));
        }
        if slope.is_positive() {
            low = mid;
        } else {
            high = mid;
        }
    }
    Err(Error::InvariantViolation(
        "parametric mean-cycle search failed to terminate".into(),
    ))
}

fn lambda_witness(
    auto: &NielsenWord,
    graph: &LevelGraph,
    forward: &LengthWeights,
    backward: &LengthWeights,
    value: &Rational,
    minimizer: Minimizer,
    options: &OptimizeOptions,
) -> Result<(bool, Option<(CyclicWord, Rational)>)> {
    let two_sided = |q: &FrequencyVector| -> Rational {
        let f = length_functional(forward, q);
        let b = length_functional(backward, q);
        f.max(b)
    };
    let minimizing_vector = match minimizer {
        Minimizer::Single(cycle) => graph.cycle_vector(&cycle),
        Minimizer::Pair { low, high, mix } => {
            let low_vec = graph.cycle_vector(&low);
            let high_vec = graph.cycle_vector(&high);
            let complement = Rational::one() - &mix;
            FrequencyVector::linear_combination(&[(mix, &low_vec), (complement, &high_vec)])?
        }
    };
    if two_sided(&minimizing_vector) != *value {
        return Err(Error::InvariantViolation(
            "minimizer does not achieve the reported two-sided value".into(),
        ));
    }
    if minimizing_vector.is_realizable()? {
        if let Ok(witness) = minimizing_vector.realize_with_cap(options.witness_cap) {
            let word = witness.word;
            verify_two_sided(auto, &word, value, &Rational::zero())?;
            return Ok((true, Some((word, Rational::zero()))));
        }
        // fall through to the perturbation path on budget failures
    }
    // disconnected minimizer support: produce an interior class with a
    // certified gap below the tolerance
    let mut eps = Rational::new(BigInt::one(), BigInt::from(2));
    for _ in 0..64 {
        let moved = interior_perturb(&minimizing_vector, &eps)?;
        let gap = two_sided(&moved) - value;
        debug_assert!(!gap.is_negative());
        if gap <= options.lambda_gap {
            match moved.realize_with_cap(options.witness_cap) {
                Ok(witness) => {
                    let word = witness.word;
                    verify_two_sided(auto, &word, value, &gap)?;
                    return Ok((false, Some((word, gap))));
                }
                Err(Error::BudgetExceeded(_)) => return Ok((false, None)),
                Err(other) => return Err(other),
            }
        }
        eps /= Rational::from(BigInt::from(2));
    }
    Ok((false, None))
}

/// Checks that a witness class's two-sided distortion is value + gap exactly.
fn verify_two_sided(
    auto: &NielsenWord,
    word: &CyclicWord,
    value: &Rational,
    gap: &Rational,
) -> Result<()> {
    let len = Rational::from(BigInt::from(word.len() as u64));
    let f = Rational::from(BigInt::from(auto.apply_cyclic(word).len() as u64)) / &len;
    let b = Rational::from(BigInt::from(auto.inverse().apply_cyclic(word).len() as u64)) / &len;
    if f.max(b) != value + gap {
        return Err(Error::InvariantViolation(
            "two-sided witness does not achieve its certified value".into(),
        ));
    }
    Ok(())
}

/// Strict hyperbolicity: the hyperbolicity constant exceeds 1.
pub fn is_strictly_hyperbolic(auto: &NielsenWord) -> Result<bool> {
    is_strictly_hyperbolic_with(auto, &OptimizeOptions::default())
}

pub fn is_strictly_hyperbolic_with(auto: &NielsenWord, options: &OptimizeOptions) -> Result<bool> {
    Ok(lambda0_with(auto, options)?.value > Rational::one())
}

/// Constructs a class whose distortion ratio is exactly `ratio`, which must
/// lie in the closed distortion interval. Interior ratios are realized by an
/// exact convex combination of perturbed extreme witnesses.
pub fn realize_ratio(auto: &NielsenWord, ratio: &Rational) -> Result<CyclicWord> {
    realize_ratio_with(auto, ratio, &OptimizeOptions::default())
}

pub fn realize_ratio_with(
    auto: &NielsenWord,
    ratio: &Rational,
    options: &OptimizeOptions,
) -> Result<CyclicWord> {
    let plus = nu_plus_with(auto, options)?;
    let minus = nu_minus_with(auto, options)?;
    if *ratio == plus.value {
        return Ok(plus.witness);
    }
    if *ratio == minus.value {
        return Ok(minus.witness);
    }
    if *ratio > plus.value || *ratio < minus.value {
        return Err(Error::NotRealizable(format!(
            "ratio outside the distortion interval [{}, {}]",
            crate::rational::format(&minus.value),
            crate::rational::format(&plus.value)
        )));
    }
    let weights = length_weights_with_budget(auto, options.transfer)?;
    let level = weights.max_pattern_len().max(2);
    let alphabet = auto.alphabet();
    let functional = |q: &FrequencyVector| length_functional(&weights, q);

    let perturb_until = |witness: &CyclicWord, above: bool| -> Result<FrequencyVector> {
        let base = crate::words::frequency_vector(&alphabet, witness, level);
        let mut eps = Rational::new(BigInt::one(), BigInt::from(2));
        for _ in 0..128 {
            let moved = interior_perturb(&base, &eps)?;
            let value = functional(&moved);
            if (above && value > *ratio) || (!above && value < *ratio) {
                return Ok(moved);
            }
            eps /= Rational::from(BigInt::from(2));
        }
        Err(Error::InvariantViolation(
            "perturbation failed to keep the functional on one side".into(),
        ))
    };

    let upper = perturb_until(&plus.witness, true)?;
    let lower = perturb_until(&minus.witness, false)?;
    let upper_value = functional(&upper);
    let lower_value = functional(&lower);
    // solve s·lower + (1-s)·upper = ratio
    let s = (&upper_value - ratio) / (&upper_value - &lower_value);
    debug_assert!(s.is_positive() && s < Rational::one());
    let complement = Rational::one() - &s;
    let mixed = FrequencyVector::linear_combination(&[(s, &lower), (complement, &upper)])?;
    let witness = mixed.realize_with_cap(options.witness_cap)?.word;
    let achieved = Rational::new(
        BigInt::from(auto.apply_cyclic(&witness).len() as u64),
        BigInt::from(witness.len() as u64),
    );
    if achieved != *ratio {
        return Err(Error::InvariantViolation(
            "constructed class does not achieve the requested ratio".into(),
        ));
    }
    Ok(witness)
}

/// Outcome of the hyperbolicity semi-decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperbolicityVerdict {
    /// Some power is strictly hyperbolic.
    Hyperbolic(u32),
    /// A nontrivial class fixed by the stated power.
    PeriodicClass(CyclicWord, u32),
    /// Neither procedure concluded within the budget.
    BudgetExhausted,
}

/// Interleaves strict-hyperbolicity checks of powers with a breadth-limited
/// search for periodic conjugacy classes.
pub fn decide_hyperbolic(
    auto: &NielsenWord,
    power_budget: u32,
    options: &OptimizeOptions,
) -> Result<HyperbolicityVerdict> {
    let alphabet = auto.alphabet();
    let powers: Vec<NielsenWord> = (0..=power_budget as usize).map(|n| auto.power(n)).collect();
    for round in 1..=power_budget {
        match is_strictly_hyperbolic_with(&powers[round as usize], options) {
            Ok(true) => return Ok(HyperbolicityVerdict::Hyperbolic(round)),
            Ok(false) => {}
            Err(Error::BudgetExceeded(_)) => {} // inconclusive at this power
            Err(other) => return Err(other),
        }
        for exponent in 1..=round {
            // new lengths for old powers, all lengths for the new power
            let lengths: Vec<usize> = if exponent == round {
                (1..=round as usize).collect()
            } else {
                vec![round as usize]
            };
            for len in lengths {
                for w in crate::oracle::cyclic_words_of_length(&alphabet, len) {
                    if powers[exponent as usize].apply_cyclic(&w) == w {
                        return Ok(HyperbolicityVerdict::PeriodicClass(w, exponent));
                    }
                }
            }
        }
    }
    Ok(HyperbolicityVerdict::BudgetExhausted)
}

/// Exact simplex cross-check of the distortion extremes. `None` when the
/// level has more coordinates than the configured simplex budget.
pub fn nu_extremes_lp(
    auto: &NielsenWord,
    options: &OptimizeOptions,
) -> Result<Option<(Rational, Rational)>> {
    let weights = length_weights_with_budget(auto, options.transfer)?;
    let level = weights.max_pattern_len().max(2);
    let alphabet = auto.alphabet();
    if alphabet.word_count(level) > options.lp_variable_budget {
        return Ok(None);
    }
    let graph = LevelGraph::new(&alphabet, level, options.vertex_budget)?;
    let array = graph.edge_weights(weights.weights())?;
    let (a, b) = polytope_constraints(&graph);
    let costs: Vec<Rational> = array
        .iter()
        .map(|w| Rational::from(BigInt::from(*w)))
        .collect();
    let (max_value, _) = simplex::maximize(&a, &b, &costs)?;
    let (min_value, _) = simplex::minimize(&a, &b, &costs)?;
    Ok(Some((min_value, max_value)))
}

/// Exact simplex cross-check of the hyperbolicity constant.
pub fn lambda0_lp(auto: &NielsenWord, options: &OptimizeOptions) -> Result<Option<Rational>> {
    let inverse = auto.inverse();
    let forward = length_weights_with_budget(auto, options.transfer)?;
    let backward = length_weights_with_budget(&inverse, options.transfer)?;
    let level = forward
        .max_pattern_len()
        .max(backward.max_pattern_len())
        .max(2);
    let alphabet = auto.alphabet();
    if alphabet.word_count(level) > options.lp_variable_budget {
        return Ok(None);
    }
    let graph = LevelGraph::new(&alphabet, level, options.vertex_budget)?;
    let wf = graph.edge_weights(forward.weights())?;
    let wb = graph.edge_weights(backward.weights())?;
    let (base_a, base_b) = polytope_constraints(&graph);
    let edges = graph.edge_count();
    // columns: z, the coordinates, then one slack per side
    let cols = 1 + edges + 2;
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for (row, rhs) in base_a.iter().zip(&base_b) {
        let mut extended = vec![Rational::zero(); cols];
        extended[1..=edges].clone_from_slice(row);
        a.push(extended);
        b.push(rhs.clone());
    }
    for (weights_row, slack) in [(&wf, cols - 2), (&wb, cols - 1)] {
        let mut row = vec![Rational::zero(); cols];
        row[0] = Rational::one();
        for (e, w) in weights_row.iter().enumerate() {
            row[1 + e] = Rational::from(BigInt::from(-*w));
        }
        row[slack] = -Rational::one();
        a.push(row);
        b.push(Rational::zero());
    }
    let mut costs = vec![Rational::zero(); cols];
    costs[0] = Rational::one();
    let (value, _) = simplex::minimize(&a, &b, &costs)?;
    Ok(Some(value))
}

/// Distortion extremes by enumerating extremal points (uniform simple
/// cycles); `None` when the level graph is too large to enumerate.
pub fn nu_extremes_by_vertex_enumeration(
    auto: &NielsenWord,
    cycle_budget: usize,
) -> Result<Option<(Rational, Rational)>> {
    let weights = length_weights_with_budget(auto, TransferBudget::default())?;
    let level = weights.max_pattern_len().max(2);
    let alphabet = auto.alphabet();
    if alphabet.word_count(level) > 200 {
        return Ok(None);
    }
    let vertices = match crate::polytope::enumerate_vertices(&alphabet, level, cycle_budget) {
        Ok(vertices) => vertices,
        Err(Error::BudgetExceeded(_)) => return Ok(None),
        Err(other) => return Err(other),
    };
    let mut min: Option<Rational> = None;
    let mut max: Option<Rational> = None;
    for vertex in &vertices {
        let value = length_functional(&weights, vertex);
        if min.as_ref().is_none_or(|m| value < *m) {
            min = Some(value.clone());
        }
        if max.as_ref().is_none_or(|m| value > *m) {
            max = Some(value);
        }
    }
    Ok(min.zip(max))
}

fn polytope_constraints(graph: &LevelGraph) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let edges = graph.edge_count();
    let vertices = graph.vertex_count();
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(vertices + 1);
    let mut b: Vec<Rational> = Vec::with_capacity(vertices + 1);
    a.push(vec![Rational::one(); edges]);
    b.push(Rational::one());
    let mut balance = vec![vec![Rational::zero(); edges]; vertices];
    for v in 0..vertices {
        for r in 0..graph.branch() {
            let e = v * graph.branch() + r;
            let t = graph.step(v, r);
            balance[v][e] -= Rational::one();
            balance[t][e] += Rational::one();
        }
    }
    for row in balance {
        a.push(row);
        b.push(Rational::zero());
    }
    (a, b)
}

/// Full distortion report for one automorphism.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub rank: usize,
    pub auto_text: String,
    /// Graph level used for the two-sided optimization.
    pub level: usize,
    /// Nominal proven window bound for this factorization (both directions).
    pub window_length: u64,
    pub nu_plus: Rational,
    pub nu_plus_witness: CyclicWord,
    pub nu_minus: Rational,
    pub nu_minus_witness: CyclicWord,
    pub lambda0: Rational,
    pub lambda0_attained: bool,
    pub lambda0_witness: Option<(CyclicWord, Rational)>,
    pub strictly_hyperbolic: bool,
    pub extremes_ms: u128,
    pub lambda_ms: u128,
}

/// Computes the distortion extremes, the hyperbolicity constant, witnesses,
/// and the strict-hyperbolicity verdict.
pub fn spectrum(auto: &NielsenWord, options: &OptimizeOptions) -> Result<SpectrumReport> {
    let started = Instant::now();
    let plus = nu_plus_with(auto, options)?;
    let minus = nu_minus_with(auto, options)?;
    let extremes_ms = started.elapsed().as_millis();

    let started = Instant::now();
    let lambda = lambda0_with(auto, options)?;
    let lambda_ms = started.elapsed().as_millis();

    let inverse_len = auto.inverse().len();
    let strictly_hyperbolic = lambda.value > Rational::one();
    Ok(SpectrumReport {
        rank: auto.rank(),
        auto_text: auto.to_string(),
        level: lambda.level,
        window_length: window_bound(auto.len(), 1).max(window_bound(inverse_len, 1)),
        nu_plus: plus.value,
        nu_plus_witness: plus.witness,
        nu_minus: minus.value,
        nu_minus_witness: minus.witness,
        lambda0: lambda.value,
        lambda0_attained: lambda.attained,
        lambda0_witness: lambda.witness,
        strictly_hyperbolic,
        extremes_ms,
        lambda_ms,
    })
}
