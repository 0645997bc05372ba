//! The frequency polytopes: membership, projection between levels, initial
//! graphs, realization of rational points by cyclic words, extremal points,
//! and barycenter perturbation.

use crate::error::{Error, Result};
use crate::words::{deepest_root, frequency_vector, Alphabet, CyclicWord, Letter, Word};
use crate::{rational, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Default cap on the length of words constructed by Euler circuits.
pub const DEFAULT_REALIZE_CAP: u64 = 10_000_000;

/// A level-m vector of exact rational coordinates keyed by freely reduced
/// words of length m. Absent keys are zero; stored entries are nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyVector {
    rank: usize,
    level: usize,
    entries: BTreeMap<Word, Rational>,
}

impl FrequencyVector {
    /// Builds a vector, validating key lengths and letter ranges.
    pub fn new(
        rank: usize,
        level: usize,
        entries: impl IntoIterator<Item = (Word, Rational)>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(rank)?;
        let mut map = BTreeMap::new();
        for (word, value) in entries {
            if word.len() != level {
                return Err(Error::LevelMismatch(format!(
                    "entry key {word} has length {}, expected {level}",
                    word.len()
                )));
            }
            if !word.letters().iter().all(|&l| alphabet.contains(l)) {
                return Err(Error::Parse(format!(
                    "entry key {word} uses letters outside rank {rank}"
                )));
            }
            if value.is_zero() {
                continue;
            }
            if map.insert(word.clone(), value).is_some() {
                return Err(Error::Parse(format!("duplicate entry for {word}")));
            }
        }
        Ok(FrequencyVector { rank, level, entries: map })
    }

    /// Internal fast path for entries already known to be valid.
    pub(crate) fn from_validated(
        rank: usize,
        level: usize,
        entries: BTreeMap<Word, Rational>,
    ) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        FrequencyVector { rank, level, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.rank).expect("rank validated at construction")
    }

    /// Coordinate lookup; absent keys are zero.
    pub fn get(&self, word: &Word) -> Rational {
        self.entries.get(word).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.entries.iter()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn coordinate_sum(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Sum of coordinates over all words with the given prefix. For p of
    /// length at most the level this is the level-|p| marginal coordinate.
    pub fn prefix_marginal(&self, prefix: &Word) -> Rational {
        self.entries
            .iter()
            .filter(|(w, _)| w.starts_with(prefix))
            .fold(Rational::zero(), |acc, (_, v)| acc + v)
    }

    /// Exact linear combination of identically shaped vectors.
    pub fn linear_combination(terms: &[(Rational, &FrequencyVector)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| {
            Error::LevelMismatch("linear combination of zero vectors".into())
        })?;
        let (rank, level) = (first.rank, first.level);
        let mut acc: BTreeMap<Word, Rational> = BTreeMap::new();
        for (coeff, vector) in terms {
            if vector.rank != rank || vector.level != level {
                return Err(Error::LevelMismatch(
                    "combined vectors must share rank and level".into(),
                ));
            }
            for (word, value) in &vector.entries {
                let term = coeff * value;
                *acc.entry(word.clone()).or_insert_with(Rational::zero) += term;
            }
        }
        Ok(FrequencyVector::from_validated(rank, level, acc))
    }

    /// Exact membership test: coordinates sum to 1, are nonnegative, and at
    /// levels >= 2 satisfy flow balance at every length m-1 word.
    pub fn check_membership(&self) -> bool {
        self.membership_violation().is_none()
    }

    /// `None` when the vector is a polytope point, otherwise a description of
    /// the first violated condition.
    pub fn membership_violation(&self) -> Option<String> {
        if self.level == 0 {
            let expected: BTreeMap<Word, Rational> =
                [(Word::empty(), Rational::one())].into_iter().collect();
            return (self.entries != expected).then(|| "level-0 point must be {1}".into());
        }
        if self.entries.values().any(|v| v.is_negative()) {
            return Some("negative coordinate".into());
        }
        if !self.coordinate_sum().is_one() {
            return Some(format!(
                "coordinates sum to {}, not 1",
                rational::format(&self.coordinate_sum())
            ));
        }
        if self.level >= 2 {
            let mut outgoing: BTreeMap<Word, Rational> = BTreeMap::new();
            let mut incoming: BTreeMap<Word, Rational> = BTreeMap::new();
            for (word, value) in &self.entries {
                let head = word.prefix(self.level - 1);
                let tail = word.suffix(self.level - 1);
                *outgoing.entry(head).or_insert_with(Rational::zero) += value;
                *incoming.entry(tail).or_insert_with(Rational::zero) += value;
            }
            let keys: Vec<Word> = outgoing.keys().chain(incoming.keys()).cloned().collect();
            for key in keys {
                let out = outgoing.get(&key).cloned().unwrap_or_else(Rational::zero);
                let inc = incoming.get(&key).cloned().unwrap_or_else(Rational::zero);
                if out != inc {
                    return Some(format!("flow imbalance at {key}"));
                }
            }
        }
        None
    }

    fn require_membership(&self) -> Result<()> {
        match self.membership_violation() {
            None => Ok(()),
            Some(violation) => Err(Error::NotInPolytope(violation)),
        }
    }

    /// Projects a level-m point to level m-1 by summing over appended letters.
    pub fn project(&self) -> Result<FrequencyVector> {
        if self.level == 0 {
            return Err(Error::LevelMismatch("cannot project below level 0".into()));
        }
        self.require_membership()?;
        let mut acc: BTreeMap<Word, Rational> = BTreeMap::new();
        for (word, value) in &self.entries {
            let head = word.prefix(self.level - 1);
            *acc.entry(head).or_insert_with(Rational::zero) += value;
        }
        Ok(FrequencyVector::from_validated(self.rank, self.level - 1, acc))
    }

    /// The labeled digraph on length m-1 words whose edges are the support
    /// words. Defined for levels >= 2.
    pub fn initial_graph(&self) -> Result<InitialGraph> {
        if self.level < 2 {
            return Err(Error::LevelMismatch(format!(
                "initial graphs need level >= 2, got {}",
                self.level
            )));
        }
        self.require_membership()?;
        let mut vertices: Vec<Word> = Vec::new();
        for (word, _) in &self.entries {
            vertices.push(word.prefix(self.level - 1));
            vertices.push(word.suffix(self.level - 1));
        }
        vertices.sort();
        vertices.dedup();
        let index: BTreeMap<&Word, usize> =
            vertices.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let edges = self
            .entries
            .iter()
            .map(|(word, value)| InitialEdge {
                from: index[&word.prefix(self.level - 1)],
                to: index[&word.suffix(self.level - 1)],
                word: word.clone(),
                label: value.clone(),
            })
            .collect();
        Ok(InitialGraph { vertices, edges })
    }

    /// Whether the point is the frequency vector of some cyclic word: at
    /// level 1 no letter pair may carry the whole mass with both signs
    /// positive, and at levels >= 2 the pruned initial graph is connected.
    pub fn is_realizable(&self) -> Result<bool> {
        if self.level == 0 {
            return Err(Error::LevelMismatch("realizability starts at level 1".into()));
        }
        self.require_membership()?;
        if self.level == 1 {
            for (word, value) in &self.entries {
                let inverse = word.inverse();
                let opposite = self.get(&inverse);
                if !opposite.is_zero() && (value + &opposite).is_one() {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        Ok(self.initial_graph()?.is_connected())
    }

    /// Constructs a cyclic word whose frequency vector equals this point.
    pub fn realize(&self) -> Result<RealizationWitness> {
        self.realize_with_cap(DEFAULT_REALIZE_CAP)
    }

    pub fn realize_with_cap(&self, cap: u64) -> Result<RealizationWitness> {
        if !self.is_realizable()? {
            return Err(Error::NotRealizable(
                "pruned initial graph is disconnected or the level-1 obstruction holds".into(),
            ));
        }
        let scale = self.denominator_lcm();
        let word = if self.level == 1 {
            self.realize_level1(&scale, cap)?
        } else {
            self.realize_euler(&scale, cap)?
        };
        let witness = deepest_root(&word).0;
        debug_assert_eq!(
            frequency_vector(&self.alphabet(), &witness, self.level),
            *self,
            "realized word must reproduce the vector exactly"
        );
        let scale = witness.len() as u64;
        Ok(RealizationWitness { word: witness, scale })
    }

    fn denominator_lcm(&self) -> BigInt {
        self.entries
            .values()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
    }

    fn scaled_count(&self, scale: &BigInt, value: &Rational, cap: u64) -> Result<u64> {
        let scaled = value * Rational::from(scale.clone());
        debug_assert!(scaled.is_integer());
        let scaled = scaled.to_integer();
        u64::try_from(&scaled)
            .ok()
            .filter(|&c| c <= cap)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "realization needs {scaled} copies of one block, cap is {cap}"
                ))
            })
    }

    /// Level-1 realization by concatenating letter blocks: one block per
    /// generator sign when only one sign occurs, doubled split blocks when
    /// both signs occur.
    fn realize_level1(&self, scale: &BigInt, cap: u64) -> Result<CyclicWord> {
        let alphabet = self.alphabet();
        let mut alpha: Vec<Letter> = Vec::new();
        let mut beta: Vec<Letter> = Vec::new();
        let two = BigInt::from(2u32);
        for i in 1..=alphabet.rank() {
            let gen = Letter::generator(i);
            let qa = self.get(&Word::single(gen));
            let qi = self.get(&Word::single(gen.inverse()));
            let push = |target: &mut Vec<Letter>, letter: Letter, count: u64| {
                target.extend(std::iter::repeat(letter).take(count as usize));
            };
            match (qa.is_zero(), qi.is_zero()) {
                (true, true) => {}
                (false, true) => {
                    let count = self.scaled_count(scale, &qa, cap)?;
                    push(&mut alpha, gen, count);
                    push(&mut beta, gen, count);
                }
                (true, false) => {
                    let count = self.scaled_count(scale, &qi, cap)?;
                    push(&mut alpha, gen.inverse(), count);
                    push(&mut beta, gen.inverse(), count);
                }
                (false, false) => {
                    let ca = self.scaled_count(scale, &(&qa * Rational::from(two.clone())), cap)?;
                    let ci = self.scaled_count(scale, &(&qi * Rational::from(two.clone())), cap)?;
                    push(&mut alpha, gen, ca);
                    push(&mut beta, gen.inverse(), ci);
                }
            }
        }
        alpha.extend(beta);
        if alpha.len() as u64 > cap {
            return Err(Error::BudgetExceeded(format!(
                "realized word would have {} letters, cap is {cap}",
                alpha.len()
            )));
        }
        CyclicWord::new(&Word::from_reduced(alpha))
            .ok_or_else(|| Error::InvariantViolation("level-1 construction was empty".into()))
    }

    /// Level >= 2 realization: Euler circuit on the integer-scaled pruned
    /// graph via Hierholzer's algorithm, reading the last letter of each
    /// traversed edge. Deterministic: the start vertex is the least vertex
    /// and edge bundles are consumed in sorted word order.
    fn realize_euler(&self, scale: &BigInt, cap: u64) -> Result<CyclicWord> {
        let graph = self.initial_graph()?;
        let total = self.scaled_count(scale, &self.coordinate_sum(), cap)?;
        let mut remaining: Vec<u64> = Vec::with_capacity(graph.edges.len());
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); graph.vertices.len()];
        for (idx, edge) in graph.edges.iter().enumerate() {
            remaining.push(self.scaled_count(scale, &edge.label, cap)?);
            adjacency[edge.from].push(idx);
        }
        let start = 0usize;
        let mut path: Vec<usize> = Vec::new(); // edge indices of the Euler circuit
        let mut vertex_stack: Vec<usize> = vec![start];
        let mut edge_stack: Vec<usize> = Vec::new();
        let mut cursor: Vec<usize> = vec![0; graph.vertices.len()];
        while let Some(&vertex) = vertex_stack.last() {
            let mut found = None;
            while cursor[vertex] < adjacency[vertex].len() {
                let edge_idx = adjacency[vertex][cursor[vertex]];
                if remaining[edge_idx] > 0 {
                    found = Some(edge_idx);
                    break;
                }
                cursor[vertex] += 1;
            }
            match found {
                Some(edge_idx) => {
                    remaining[edge_idx] -= 1;
                    vertex_stack.push(graph.edges[edge_idx].to);
                    edge_stack.push(edge_idx);
                }
                None => {
                    vertex_stack.pop();
                    if let Some(edge_idx) = edge_stack.pop() {
                        path.push(edge_idx);
                    }
                }
            }
        }
        path.reverse();
        if path.len() as u64 != total {
            return Err(Error::InvariantViolation(format!(
                "Euler circuit visited {} of {total} edges",
                path.len()
            )));
        }
        let letters: Vec<Letter> = path
            .iter()
            .map(|&edge_idx| graph.edges[edge_idx].word.last().unwrap())
            .collect();
        CyclicWord::new(&Word::from_reduced(letters))
            .ok_or_else(|| Error::InvariantViolation("Euler circuit produced no letters".into()))
    }

    /// Serializes to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("level {} rank {}\n", self.level, self.rank);
        for (word, value) in &self.entries {
            out.push_str(&format!("{} = {}\n", word, rational::format(value)));
        }
        out
    }

    /// Parses the text format: a `level m rank k` header followed by
    /// `word = p/q` lines.
    pub fn parse_text(text: &str) -> Result<FrequencyVector> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty frequency vector file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (level, rank) = match fields.as_slice() {
            ["level", m, "rank", k] => (
                m.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad level {m:?}")))?,
                k.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad rank {k:?}")))?,
            ),
            _ => {
                return Err(Error::Parse(format!(
                    "expected header `level m rank k`, got {header:?}"
                )))
            }
        };
        let alphabet = Alphabet::new(rank)?;
        let mut entries = Vec::new();
        for line in lines {
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `word = value`, got {line:?}")))?;
            let word = alphabet.parse_word(lhs.trim())?;
            let value = rational::parse(rhs.trim())?;
            entries.push((word, value));
        }
        FrequencyVector::new(rank, level, entries)
    }
}

impl fmt::Display for FrequencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// A positive-labeled edge of an initial graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialEdge {
    pub word: Word,
    pub from: usize,
    pub to: usize,
    pub label: Rational,
}

/// The pruned initial graph of a polytope point: vertices are the length m-1
/// words incident to support edges, edges the support words themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialGraph {
    vertices: Vec<Word>,
    edges: Vec<InitialEdge>,
}

impl InitialGraph {
    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    pub fn edges(&self) -> &[InitialEdge] {
        &self.edges
    }

    pub fn label_sum(&self) -> Rational {
        self.edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.label)
    }

    /// Sum of in-labels equals sum of out-labels at every vertex.
    pub fn is_balanced(&self) -> bool {
        let mut balance: Vec<Rational> = vec![Rational::zero(); self.vertices.len()];
        for edge in &self.edges {
            balance[edge.from] -= &edge.label;
            balance[edge.to] += &edge.label;
        }
        balance.iter().all(Rational::is_zero)
    }

    /// Undirected connectivity of the support.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Undirected connected components as sorted vertex index lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for edge in &self.edges {
            neighbors[edge.from].push(edge.to);
            neighbors[edge.to].push(edge.from);
        }
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        for root in 0..n {
            if component[root] != usize::MAX {
                continue;
            }
            let mut stack = vec![root];
            component[root] = count;
            while let Some(v) = stack.pop() {
                for &w in &neighbors[v] {
                    if component[w] == usize::MAX {
                        component[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for (v, &c) in component.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// A realized cyclic word together with the scale at which the vector's
/// coordinates become integer occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationWitness {
    pub word: CyclicWord,
    pub scale: u64,
}

/// The uniform vector with every level-m coordinate 1/D(m); an interior
/// polytope point.
pub fn barycenter(alphabet: &Alphabet, level: usize) -> FrequencyVector {
    assert!(level >= 1);
    let words = alphabet.words_of_length(level);
    let share = Rational::new(BigInt::one(), BigInt::from(words.len() as u64));
    FrequencyVector::from_validated(
        alphabet.rank(),
        level,
        words.into_iter().map(|w| (w, share.clone())).collect(),
    )
}

/// Mixes a polytope point toward the barycenter: eps·z + (1-eps)·q, a
/// strictly positive point and therefore realizable.
pub fn interior_perturb(q: &FrequencyVector, eps: &Rational) -> Result<FrequencyVector> {
    if !(eps > &Rational::zero() && eps < &Rational::one()) {
        return Err(Error::Parse(format!(
            "perturbation weight must lie in (0,1), got {}",
            rational::format(eps)
        )));
    }
    q.membership_violation()
        .map_or(Ok(()), |v| Err(Error::NotInPolytope(v)))?;
    let z = barycenter(&q.alphabet(), q.level());
    let complement = Rational::one() - eps;
    FrequencyVector::linear_combination(&[(eps.clone(), &z), (complement, q)])
}

/// All extremal points of the level-m polytope: the unit vectors at level 1
/// and the uniform vectors on simple directed cycles of the level-m word
/// graph at levels >= 2. Emitted in sorted order.
pub fn enumerate_vertices(
    alphabet: &Alphabet,
    level: usize,
    budget: usize,
) -> Result<Vec<FrequencyVector>> {
    assert!(level >= 1);
    if level == 1 {
        return Ok(alphabet
            .letters()
            .map(|letter| {
                FrequencyVector::from_validated(
                    alphabet.rank(),
                    1,
                    [(Word::single(letter), Rational::one())].into_iter().collect(),
                )
            })
            .collect());
    }
    if alphabet.word_count(level) > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "level {level} has {} coordinates, budget is {budget}",
            alphabet.word_count(level)
        )));
    }
    let cycles = simple_cycles(alphabet, level, budget)?;
    let mut vectors: Vec<FrequencyVector> = cycles
        .into_iter()
        .map(|cycle| {
            let share = Rational::new(BigInt::one(), BigInt::from(cycle.len() as u64));
            FrequencyVector::from_validated(
                alphabet.rank(),
                level,
                cycle.into_iter().map(|w| (w, share.clone())).collect(),
            )
        })
        .collect();
    vectors.sort_by(|a, b| {
        let av: Vec<_> = a.support().collect();
        let bv: Vec<_> = b.support().collect();
        av.cmp(&bv)
    });
    Ok(vectors)
}

/// Simple directed cycles of the level-m word graph, as lists of edge words.
/// Each cycle is rooted at its least vertex.
fn simple_cycles(alphabet: &Alphabet, level: usize, budget: usize) -> Result<Vec<Vec<Word>>> {
    let vertices = alphabet.words_of_length(level - 1);
    let index: BTreeMap<&Word, usize> = vertices.iter().enumerate().map(|(i, w)| (w, i)).collect();
    // successors[v] = (target vertex, edge word), in sorted edge order
    let mut successors: Vec<Vec<(usize, Word)>> = vec![Vec::new(); vertices.len()];
    for edge in alphabet.words_of_length(level) {
        let from = index[&edge.prefix(level - 1)];
        let to = index[&edge.suffix(level - 1)];
        successors[from].push((to, edge));
    }
    let mut cycles = Vec::new();
    let mut on_path = vec![false; vertices.len()];
    let mut path_edges: Vec<Word> = Vec::new();
    for root in 0..vertices.len() {
        dfs_cycles(
            root,
            root,
            &successors,
            &mut on_path,
            &mut path_edges,
            &mut cycles,
            budget,
        )?;
    }
    Ok(cycles)
}

fn dfs_cycles(
    root: usize,
    current: usize,
    successors: &[Vec<(usize, Word)>],
    on_path: &mut Vec<bool>,
    path_edges: &mut Vec<Word>,
    cycles: &mut Vec<Vec<Word>>,
    budget: usize,
) -> Result<()> {
    on_path[current] = true;
    for (target, edge) in &successors[current] {
        if *target == root {
            path_edges.push(edge.clone());
            cycles.push(path_edges.clone());
            path_edges.pop();
            if cycles.len() > budget {
                return Err(Error::BudgetExceeded(format!(
                    "more than {budget} extremal cycles"
                )));
            }
        } else if *target > root && !on_path[*target] {
            path_edges.push(edge.clone());
            dfs_cycles(root, *target, successors, on_path, path_edges, cycles, budget)?;
            path_edges.pop();
        }
    }
    on_path[current] = false;
    Ok(())
}

/// Dimension of the affine hull of a point set, computed by exact Gaussian
/// elimination on coordinate differences.
pub fn affine_dimension(points: &[FrequencyVector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let mut coordinates: Vec<Word> = Vec::new();
    for p in points {
        coordinates.extend(p.support().map(|(w, _)| w.clone()));
    }
    coordinates.sort();
    coordinates.dedup();
    let base = &points[0];
    let mut rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| {
            coordinates
                .iter()
                .map(|w| p.get(w) - base.get(w))
                .collect()
        })
        .collect();
    matrix_rank(&mut rows)
}

fn matrix_rank(rows: &mut [Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let head = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &head;
            for c in col..cols {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn word(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    fn cyc(s: &str) -> CyclicWord {
        ab().parse_cyclic(s).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn paper_vector() -> FrequencyVector {
        FrequencyVector::new(
            2,
            3,
            [
                (word("aba"), rat(2, 5)),
                (word("bab"), rat(1, 5)),
                (word("aab"), rat(1, 5)),
                (word("baa"), rat(1, 5)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn membership_checks_the_three_conditions() {
        assert!(paper_vector().check_membership());
        let level1 =
            FrequencyVector::new(2, 1, [(word("a"), rat(1, 2)), (word("b"), rat(1, 2))]).unwrap();
        assert!(level1.check_membership());
        // Level-1 points need no balance condition.
        let unit = FrequencyVector::new(2, 1, [(word("a"), rat(1, 1))]).unwrap();
        assert!(unit.check_membership());

        let bad_sum = FrequencyVector::new(2, 1, [(word("a"), rat(1, 2))]).unwrap();
        assert!(!bad_sum.check_membership());
        let negative =
            FrequencyVector::new(2, 1, [(word("a"), rat(3, 2)), (word("b"), rat(-1, 2))]).unwrap();
        assert!(!negative.check_membership());
        let unbalanced = FrequencyVector::new(2, 2, [(word("ab"), rat(1, 1))]).unwrap();
        assert!(!unbalanced.check_membership());
        // Keys of the wrong length are construction errors.
        assert!(FrequencyVector::new(2, 2, [(word("a"), rat(1, 1))]).is_err());
    }

    #[test]
    fn projection_commutes_with_frequency_vectors() {
        let w = cyc("abaab");
        let q3 = frequency_vector(&ab(), &w, 3);
        assert_eq!(q3.project().unwrap(), frequency_vector(&ab(), &w, 2));

        let level1 =
            FrequencyVector::new(2, 1, [(word("a"), rat(1, 2)), (word("b"), rat(1, 2))]).unwrap();
        let level0 = level1.project().unwrap();
        assert_eq!(level0.level(), 0);
        assert_eq!(level0.get(&Word::empty()), rat(1, 1));
        assert!(level0.check_membership());

        assert_eq!(
            barycenter(&ab(), 2).project().unwrap(),
            barycenter(&ab(), 1)
        );
    }

    #[test]
    fn initial_graph_of_paper_vector() {
        let graph = paper_vector().initial_graph().unwrap();
        let names: Vec<String> = graph.vertices().iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["aa", "ab", "ba"]);
        assert_eq!(graph.edges().len(), 4);
        assert!(graph.is_balanced());
        assert!(graph.is_connected());
        assert!(graph.label_sum().is_one());
        let lookup = |s: &str| {
            graph
                .edges()
                .iter()
                .find(|e| e.word == word(s))
                .unwrap()
                .label
                .clone()
        };
        assert_eq!(lookup("aba"), rat(2, 5));
        assert_eq!(lookup("bab"), rat(1, 5));
        assert_eq!(lookup("aab"), rat(1, 5));
        assert_eq!(lookup("baa"), rat(1, 5));
    }

    #[test]
    fn two_cycle_and_disconnected_graphs() {
        let cycle = frequency_vector(&ab(), &cyc("ab"), 2);
        let graph = cycle.initial_graph().unwrap();
        assert_eq!(graph.vertices().len(), 2);
        assert_eq!(graph.edges().len(), 2);
        assert!(graph.is_connected());

        let half = rat(1, 2);
        let left = frequency_vector(&ab(), &cyc("ab"), 2);
        let right = frequency_vector(&ab(), &cyc("AB"), 2);
        let mixed = FrequencyVector::linear_combination(&[
            (half.clone(), &left),
            (half, &right),
        ])
        .unwrap();
        assert!(mixed.check_membership());
        let graph = mixed.initial_graph().unwrap();
        assert_eq!(graph.components().len(), 2);
        assert!(!mixed.is_realizable().unwrap());
    }

    #[test]
    fn realizability_criteria() {
        assert!(paper_vector().is_realizable().unwrap());
        let obstructed =
            FrequencyVector::new(2, 1, [(word("a"), rat(1, 2)), (word("A"), rat(1, 2))]).unwrap();
        assert!(!obstructed.is_realizable().unwrap());
        let fine =
            FrequencyVector::new(2, 1, [(word("a"), rat(1, 2)), (word("b"), rat(1, 2))]).unwrap();
        assert!(fine.is_realizable().unwrap());
        // Not even a polytope point -> error, not false.
        let junk = FrequencyVector::new(2, 1, [(word("a"), rat(1, 2))]).unwrap();
        assert!(junk.is_realizable().is_err());
    }

    #[test]
    fn realize_reproduces_the_paper_example() {
        let q = paper_vector();
        let witness = q.realize().unwrap();
        assert_eq!(witness.word.len(), 5);
        assert_eq!(witness.scale, 5);
        assert_eq!(
            crate::words::count_occurrences(&witness.word, &word("aba")),
            2
        );
        for u in ["bab", "aab", "baa"] {
            assert_eq!(
                crate::words::count_occurrences(&witness.word, &word(u)),
                1
            );
        }
        assert_eq!(frequency_vector(&ab(), &witness.word, 3), q);
    }

    #[test]
    fn realize_level1_block_construction() {
        let unit = FrequencyVector::new(2, 1, [(word("a"), rat(1, 1))]).unwrap();
        assert_eq!(unit.realize().unwrap().word, cyc("a"));

        let q = FrequencyVector::new(
            2,
            1,
            [
                (word("a"), rat(1, 2)),
                (word("b"), rat(1, 4)),
                (word("B"), rat(1, 4)),
            ],
        )
        .unwrap();
        let witness = q.realize().unwrap();
        assert_eq!(witness.word.len(), 8);
        let count = |s: &str| crate::words::count_occurrences(&witness.word, &word(s));
        assert_eq!(count("a"), 4);
        assert_eq!(count("b"), 2);
        assert_eq!(count("B"), 2);
        assert_eq!(count("A"), 0);
        assert_eq!(frequency_vector(&ab(), &witness.word, 1), q);
    }

    #[test]
    fn realize_round_trips_random_words() {
        let mut rng = StdRng::seed_from_u64(19);
        let alphabet = ab();
        for _ in 0..60 {
            let w = crate::words::testutil::random_cyclic(&mut rng, 2, 10);
            for m in 1..=4usize {
                let q = frequency_vector(&alphabet, &w, m);
                let witness = q.realize().unwrap();
                assert_eq!(frequency_vector(&alphabet, &witness.word, m), q);
            }
        }
    }

    #[test]
    fn barycenter_is_interior() {
        let b1 = barycenter(&ab(), 1);
        assert_eq!(b1.support_len(), 4);
        assert!(b1.support().all(|(_, v)| *v == rat(1, 4)));

        let b2 = barycenter(&ab(), 2);
        assert_eq!(b2.support_len(), 12);
        assert!(b2.support().all(|(_, v)| *v == rat(1, 12)));

        assert!(barycenter(&ab(), 3).check_membership());
    }

    #[test]
    fn perturbation_moves_into_the_interior() {
        let obstructed =
            FrequencyVector::new(2, 1, [(word("a"), rat(1, 2)), (word("A"), rat(1, 2))]).unwrap();
        assert!(!obstructed.is_realizable().unwrap());
        let moved = interior_perturb(&obstructed, &rat(1, 2)).unwrap();
        assert!(moved.is_realizable().unwrap());
        let witness = moved.realize().unwrap();
        assert_eq!(frequency_vector(&ab(), &witness.word, 1), moved);

        let q = paper_vector();
        let moved = interior_perturb(&q, &rat(1, 5)).unwrap();
        assert_eq!(moved.support_len(), 36);
        assert!(moved.support().all(|(_, v)| v > &Rational::zero()));
        assert!(moved.check_membership());

        assert!(interior_perturb(&q, &rat(0, 1)).is_err());
        assert!(interior_perturb(&q, &rat(1, 1)).is_err());
        // eps -> 0 recovers q coordinatewise: check a tiny eps stays close in
        // the exact sense eps·z + (1-eps)·q - q = eps·(z - q).
        let eps = rat(1, 1000);
        let moved = interior_perturb(&q, &eps).unwrap();
        let z = barycenter(&ab(), 3);
        for (w, v) in moved.support() {
            let expected = &eps * z.get(w) + (Rational::one() - &eps) * q.get(w);
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn vertex_enumeration_level1_and_level2() {
        let level1 = enumerate_vertices(&ab(), 1, 1000).unwrap();
        assert_eq!(level1.len(), 4);
        for v in &level1 {
            assert_eq!(v.support_len(), 1);
            assert!(v.check_membership());
        }

        let level2 = enumerate_vertices(&ab(), 2, 100_000).unwrap();
        // 4 loops + 4 two-cycles + 2 four-cycles in the rank-2 letter graph.
        assert_eq!(level2.len(), 10);
        for v in &level2 {
            assert!(v.check_membership());
            assert!(v.is_realizable().unwrap(), "extremal point not realizable");
            // uniform on its support
            let share = rat(1, v.support_len() as i64);
            assert!(v.support().all(|(_, value)| *value == share));
        }
    }

    #[test]
    fn vertex_enumeration_matches_generic_basis_enumeration() {
        // Independent oracle: enumerate basic feasible solutions of
        // {q >= 0, sum q = 1, flow balance} directly.
        for level in [1usize, 2] {
            let fast = enumerate_vertices(&ab(), level, 100_000).unwrap();
            let slow = brute_force_vertices(&ab(), level);
            assert_eq!(fast.len(), slow.len(), "level {level}");
            for v in &fast {
                assert!(slow.contains(v), "missing vertex at level {level}");
            }
        }
    }

    /// Exhaustive basic-solution vertex enumeration for tiny levels.
    fn brute_force_vertices(alphabet: &Alphabet, level: usize) -> Vec<FrequencyVector> {
        let columns = alphabet.words_of_length(level);
        let mut constraints: Vec<Vec<Rational>> = Vec::new();
        let mut rhs: Vec<Rational> = Vec::new();
        constraints.push(vec![Rational::one(); columns.len()]);
        rhs.push(Rational::one());
        if level >= 2 {
            let keys = alphabet.words_of_length(level - 1);
            for key in keys {
                let row: Vec<Rational> = columns
                    .iter()
                    .map(|c| {
                        let mut value = Rational::zero();
                        if c.prefix(level - 1) == key {
                            value -= Rational::one();
                        }
                        if c.suffix(level - 1) == key {
                            value += Rational::one();
                        }
                        value
                    })
                    .collect();
                constraints.push(row);
                rhs.push(Rational::zero());
            }
        }
        let mut out: Vec<FrequencyVector> = Vec::new();
        let n = columns.len();
        let mut subset: Vec<usize> = Vec::new();
        enumerate_supports(n, 0, &mut subset, &mut |support| {
            if let Some(solution) = solve_on_support(&constraints, &rhs, support, n) {
                if solution.iter().all(|v| v >= &Rational::zero()) {
                    let vector = FrequencyVector::from_validated(
                        alphabet.rank(),
                        level,
                        columns
                            .iter()
                            .cloned()
                            .zip(solution.iter().cloned())
                            .collect(),
                    );
                    if vector.support_len() == support.len() && !out.contains(&vector) {
                        out.push(vector);
                    }
                }
            }
        });
        out
    }

    fn enumerate_supports(
        n: usize,
        start: usize,
        subset: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !subset.is_empty() {
            visit(subset);
        }
        if subset.len() >= 8 {
            return; // supports of extreme points here are tiny cycles
        }
        for i in start..n {
            subset.push(i);
            enumerate_supports(n, i + 1, subset, visit);
            subset.pop();
        }
    }

    /// Solves the constraint system restricted to a candidate support; returns
    /// the full coordinate vector when the restriction has a unique solution.
    fn solve_on_support(
        constraints: &[Vec<Rational>],
        rhs: &[Rational],
        support: &[usize],
        n: usize,
    ) -> Option<Vec<Rational>> {
        let rows = constraints.len();
        let cols = support.len();
        let mut matrix: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> =
                    support.iter().map(|&c| constraints[r][c].clone()).collect();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            let Some(p) = (rank..rows).find(|&r| !matrix[r][col].is_zero()) else {
                return None; // free column -> not a unique basic solution
            };
            matrix.swap(rank, p);
            let head = matrix[rank][col].clone();
            for r in 0..rows {
                if r != rank && !matrix[r][col].is_zero() {
                    let factor = &matrix[r][col] / &head;
                    for c in col..=cols {
                        let delta = &factor * &matrix[rank][c];
                        matrix[r][c] -= delta;
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        // Remaining rows must be consistent.
        for r in rank..rows {
            if !matrix[r][cols].is_zero() {
                return None;
            }
        }
        if rank < cols {
            return None;
        }
        let mut solution = vec![Rational::zero(); n];
        for (i, &col) in pivot_cols.iter().enumerate() {
            let value = &matrix[i][cols] / &matrix[i][col];
            solution[support[col]] = value;
        }
        Some(solution)
    }

    #[test]
    fn affine_dimensions_at_small_levels() {
        let level1 = enumerate_vertices(&ab(), 1, 1000).unwrap();
        assert_eq!(affine_dimension(&level1), 3);

        let level2 = enumerate_vertices(&ab(), 2, 100_000).unwrap();
        let dim = affine_dimension(&level2);
        assert!((7..=11).contains(&dim), "dim Q_2 = {dim}");
        assert_eq!(dim, 8);
    }

    #[test]
    fn text_format_round_trips() {
        let q = paper_vector();
        let text = q.to_text();
        assert_eq!(FrequencyVector::parse_text(&text).unwrap(), q);

        let parsed = FrequencyVector::parse_text("level 1 rank 2\na = 1\n").unwrap();
        assert_eq!(parsed.get(&word("a")), rat(1, 1));

        assert!(FrequencyVector::parse_text("rank 2\n").is_err());
        assert!(FrequencyVector::parse_text("level 2 rank 2\na = 1\n").is_err());
        assert!(FrequencyVector::parse_text("level 1 rank 2\na = x\n").is_err());
        assert!(
            FrequencyVector::parse_text("level 1 rank 2\na = 1/2\na = 1/2\n").is_err(),
            "duplicate keys rejected"
        );
    }
}
