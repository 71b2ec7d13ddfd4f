//! Exact membership `v/u in S` through the finite orbit graph.
//!
//! With `u` a positive rational integer, the orbit `xi_n = beta*xi_{n-1} - a_n`
//! of `v/u` stays on the lattice `(1/u) O_K`. Keeping only states inside the
//! disk of radius `R'` leaves finitely many, and `v/u` lies in `S` exactly when
//! an infinite path, i.e. a reachable cycle, starts at the root.

use std::collections::HashMap;
use std::hash::Hash;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fractal::{within_radius_sq, IfsSpec};
use crate::quadring::{FieldElem, QuadInt};
use crate::scalar::Int;

/// An eventually periodic digit sequence `pre (per)^inf`, by digit value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coding<T> {
    pub preperiod: Vec<QuadInt<T>>,
    pub period: Vec<QuadInt<T>>,
}

impl<T: Int> Coding<T> {
    /// `(beta^k (beta^m - 1), (beta^m - 1) sum a_j beta^{k-j} + sum b_j beta^{m-j})`
    /// for `k = |pre|`, `m = |per|`: denominator and numerator of the value.
    fn cleared(&self, beta: &QuadInt<T>) -> Result<(QuadInt<T>, QuadInt<T>)> {
        if self.period.is_empty() {
            return Err(Error::InvalidCoding("empty period".into()));
        }
        let field = beta.field();
        let horner = |digits: &[QuadInt<T>]| digits.iter().fold(field.zero::<T>(), |acc, a| &(&acc * beta) + a);
        let bm1 = &beta.pow(self.period.len() as u64) - &field.one::<T>();
        let num = &(&bm1 * &horner(&self.preperiod)) + &horner(&self.period);
        let den = &beta.pow(self.preperiod.len() as u64) * &bm1;
        Ok((den, num))
    }

    /// Exact value of the coding in `K`.
    pub fn value(&self, beta: &QuadInt<T>) -> Result<FieldElem<T>> {
        let (den, num) = self.cleared(beta)?;
        FieldElem::new(num, &den)
    }
}

/// Whether `coding` is a coding of `v/u` over the digits of `spec`.
pub fn verify_coding<T: Int>(coding: &Coding<T>, v: &QuadInt<T>, u: &T, spec: &IfsSpec<T>) -> Result<bool> {
    check_query(v, u, spec)?;
    let (den, num) = coding.cleared(spec.beta())?;
    let in_digits = |a: &QuadInt<T>| spec.digits().contains(a);
    if !coding.preperiod.iter().chain(&coding.period).all(in_digits) {
        return Ok(false);
    }
    Ok(&den * v == num.scale(u))
}

fn check_query<T: Int>(v: &QuadInt<T>, u: &T, spec: &IfsSpec<T>) -> Result<()> {
    if !u.is_positive() {
        return Err(Error::Precondition(format!("denominator must be positive, got {u}")));
    }
    if v.field() != spec.field() {
        return Err(Error::FieldMismatch(spec.field().d(), v.field().d()));
    }
    Ok(())
}

/// For each node of a finite digraph, whether an infinite path starts there.
/// `seed[i]` marks nodes already known to start one (through edges leaving the
/// graph). Iterative Tarjan; components complete in reverse topological order,
/// so every successor outside the current component is final.
fn infinite_path_nodes(succ: &[Vec<usize>], seed: &[bool]) -> Vec<bool> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut good = seed.to_vec();
    let mut next = 0;
    for s in 0..n {
        if index[s] != UNSEEN {
            continue;
        }
        let mut call = vec![(s, 0usize)];
        index[s] = next;
        low[s] = next;
        next += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&(v, i)) = call.last() {
            if i < succ[v].len() {
                call.last_mut().expect("non-empty").1 += 1;
                let w = succ[v][i];
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(p, _)) = call.last() {
                low[p] = low[p].min(low[v]);
            }
            if low[v] != index[v] {
                continue;
            }
            let mut comp = Vec::new();
            loop {
                let w = stack.pop().expect("component on stack");
                on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            let cyclic = comp.len() > 1 || succ[v].contains(&v);
            let reach = cyclic || comp.iter().any(|&x| good[x] || succ[x].iter().any(|&y| good[y]));
            for &x in &comp {
                good[x] = reach;
            }
        }
    }
    good
}

/// Walks from `start` taking the first viable edge until a state repeats.
fn walk_coding<K, T, F>(start: K, mut step: F) -> Coding<T>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K) -> (QuadInt<T>, K),
{
    let mut seen: HashMap<K, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&pos) = seen.get(&cur) {
            let period = digits.split_off(pos);
            return Coding {
                preperiod: digits,
                period,
            };
        }
        seen.insert(cur.clone(), digits.len());
        let (a, next) = step(&cur);
        digits.push(a);
        cur = next;
    }
}

/// The pruned orbit graph of one query. Node 0 is the root when present.
#[derive(Clone, Debug)]
pub struct StateGraph<T> {
    u: T,
    nodes: Vec<QuadInt<T>>,
    edges: Vec<Vec<(usize, usize)>>,
    good: Vec<bool>,
    digits: Vec<QuadInt<T>>,
}

impl<T: Int> StateGraph<T> {
    pub fn u(&self) -> &T {
        &self.u
    }

    /// State numerators; the state values are `numerator / u`.
    pub fn nodes(&self) -> &[QuadInt<T>] {
        &self.nodes
    }

    /// `(digit index, successor)` pairs of each node, by ascending digit index.
    pub fn edges(&self) -> &[Vec<(usize, usize)>] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_member(&self) -> bool {
        self.good.first().copied().unwrap_or(false)
    }

    /// Nodes from which an infinite path starts; these are the points of `S`
    /// in the graph.
    pub fn member_states(&self) -> impl Iterator<Item = &QuadInt<T>> {
        self.nodes.iter().zip(&self.good).filter_map(|(v, &g)| g.then_some(v))
    }

    pub fn coding(&self) -> Option<Coding<T>> {
        if !self.is_member() {
            return None;
        }
        Some(walk_coding(0usize, |&v| {
            let &(a, w) = self.edges[v]
                .iter()
                .find(|&&(_, w)| self.good[w])
                .expect("member state has a member successor");
            (self.digits[a].clone(), w)
        }))
    }
}

/// Successor numerators `beta*w - a*u` inside the disk, by digit index.
fn successors<T: Int>(
    w: &QuadInt<T>,
    u: &T,
    u_sq: &T,
    spec: &IfsSpec<T>,
    radius_sq: &Ratio<T>,
) -> Vec<(usize, QuadInt<T>)> {
    let bw = spec.beta() * w;
    spec.digits()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let next = &bw - &a.scale(u);
            within_radius_sq(radius_sq, &next.norm(), u_sq).then_some((i, next))
        })
        .collect()
}

pub fn build_state_graph<T: Int>(v: &QuadInt<T>, u: &T, spec: &IfsSpec<T>) -> Result<StateGraph<T>> {
    build_state_graph_with_radius(v, u, spec, spec.bounding_radius_sq())
}

/// As [`build_state_graph`] with an explicit pruning radius `radius_sq >= R^2`.
pub fn build_state_graph_with_radius<T: Int>(
    v: &QuadInt<T>,
    u: &T,
    spec: &IfsSpec<T>,
    radius_sq: &Ratio<T>,
) -> Result<StateGraph<T>> {
    check_query(v, u, spec)?;
    let u_sq = u.clone() * u.clone();
    let mut graph = StateGraph {
        u: u.clone(),
        nodes: Vec::new(),
        edges: Vec::new(),
        good: Vec::new(),
        digits: spec.digits().to_vec(),
    };
    if !within_radius_sq(radius_sq, &v.norm(), &u_sq) {
        return Ok(graph);
    }
    let mut index: HashMap<QuadInt<T>, usize> = HashMap::new();
    index.insert(v.clone(), 0);
    graph.nodes.push(v.clone());
    let mut head = 0;
    while head < graph.nodes.len() {
        let mut out = Vec::new();
        for (i, next) in successors(&graph.nodes[head], u, &u_sq, spec, radius_sq) {
            let j = *index.entry(next.clone()).or_insert_with(|| {
                graph.nodes.push(next);
                graph.nodes.len() - 1
            });
            out.push((i, j));
        }
        graph.edges.push(out);
        head += 1;
    }
    let succ: Vec<Vec<usize>> = graph
        .edges
        .iter()
        .map(|e| e.iter().map(|&(_, j)| j).collect())
        .collect();
    graph.good = infinite_path_nodes(&succ, &vec![false; succ.len()]);
    Ok(graph)
}

pub fn is_member<T: Int>(v: &QuadInt<T>, u: &T, spec: &IfsSpec<T>) -> Result<bool> {
    Ok(build_state_graph(v, u, spec)?.is_member())
}

/// Coding of `v/u` chosen by the lowest digit index at each step, or `None`
/// when `v/u` is not in `S`.
pub fn coding_of<T: Int>(v: &QuadInt<T>, u: &T, spec: &IfsSpec<T>) -> Result<Option<Coding<T>>> {
    Ok(build_state_graph(v, u, spec)?.coding())
}

/// Membership for a point `num/den` of `K`.
pub fn point_coding<T: Int>(z: &FieldElem<T>, spec: &IfsSpec<T>) -> Result<Option<Coding<T>>> {
    coding_of(z.num(), z.den(), spec)
}

/// Membership queries sharing one denominator `u`, with every explored state
/// memoised. Explored sets are closed under successors, so a cached verdict is
/// never revised.
#[derive(Clone, Debug)]
pub struct MembershipOracle<'a, T: Clone + num_integer::Integer> {
    spec: &'a IfsSpec<T>,
    u: T,
    u_sq: T,
    radius_sq: Ratio<T>,
    verdict: HashMap<QuadInt<T>, bool>,
}

impl<'a, T: Int> MembershipOracle<'a, T> {
    pub fn new(spec: &'a IfsSpec<T>, u: T) -> Result<Self> {
        Self::with_radius_sq(spec, u, spec.bounding_radius_sq().clone())
    }

    pub fn with_radius_sq(spec: &'a IfsSpec<T>, u: T, radius_sq: Ratio<T>) -> Result<Self> {
        check_query(&spec.field().zero(), &u, spec)?;
        Ok(Self {
            spec,
            u_sq: u.clone() * u.clone(),
            u,
            radius_sq,
            verdict: HashMap::new(),
        })
    }

    pub fn u(&self) -> &T {
        &self.u
    }

    /// Number of memoised states.
    pub fn cached_states(&self) -> usize {
        self.verdict.len()
    }

    fn in_disk(&self, w: &QuadInt<T>) -> bool {
        within_radius_sq(&self.radius_sq, &w.norm(), &self.u_sq)
    }

    /// Whether `w/u` lies in `S`.
    pub fn is_member(&mut self, w: &QuadInt<T>) -> Result<bool> {
        if w.field() != self.spec.field() {
            return Err(Error::FieldMismatch(self.spec.field().d(), w.field().d()));
        }
        if let Some(&g) = self.verdict.get(w) {
            return Ok(g);
        }
        if !self.in_disk(w) {
            return Ok(false);
        }
        let mut nodes = vec![w.clone()];
        let mut local: HashMap<QuadInt<T>, usize> = HashMap::from([(w.clone(), 0)]);
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut seed = Vec::new();
        let mut head = 0;
        while head < nodes.len() {
            let mut out = Vec::new();
            let mut known = false;
            for (_, next) in successors(&nodes[head], &self.u, &self.u_sq, self.spec, &self.radius_sq) {
                if let Some(&g) = self.verdict.get(&next) {
                    known |= g;
                    continue;
                }
                let j = *local.entry(next.clone()).or_insert_with(|| {
                    nodes.push(next);
                    nodes.len() - 1
                });
                out.push(j);
            }
            succ.push(out);
            seed.push(known);
            head += 1;
        }
        let good = infinite_path_nodes(&succ, &seed);
        for (v, g) in nodes.into_iter().zip(good) {
            self.verdict.insert(v, g);
        }
        Ok(self.verdict[w])
    }

    /// Lowest-index coding of `w/u`, or `None` for non-members.
    pub fn coding(&mut self, w: &QuadInt<T>) -> Result<Option<Coding<T>>> {
        if !self.is_member(w)? {
            return Ok(None);
        }
        let this = &*self;
        Ok(Some(walk_coding(w.clone(), |v| {
            successors(v, &this.u, &this.u_sq, this.spec, &this.radius_sq)
                .into_iter()
                .find(|(_, next)| this.verdict.get(next).copied().unwrap_or(false))
                .map(|(i, next)| (this.spec.digits()[i].clone(), next))
                .expect("member state has a member successor")
        })))
    }
}
