//! Pursuit and evasion on a finite undirected graph.
//!
//! Both players move simultaneously along an edge or stay put. Capture
//! happens when they end a stage on the same vertex or swap across an
//! edge. In the game of kind the Pursuer (Maximizer) earns 1 once, at
//! capture; in the game of degree the Evader (Maximizer) earns 1 for
//! every stage survived, so the value counts stages before capture.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::game::builder::SpecBuilder;
use crate::game::spec::GameSpec;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PursuitError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub names: Vec<String>,
    pub adjacency: Vec<BTreeSet<usize>>,
}

impl Graph {
    /// Parses an edge list: one `u v` pair per line; a lone `u` declares an
    /// isolated vertex; `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Graph, PursuitError> {
        let mut g = Graph { names: Vec::new(), adjacency: Vec::new() };
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut id = |g: &mut Graph, name: &str| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                g.names.push(name.to_string());
                g.adjacency.push(BTreeSet::new());
                g.names.len() - 1
            })
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                [u] => {
                    id(&mut g, u);
                }
                [u, v] => {
                    if u == v {
                        return Err(PursuitError::InvalidGraph(format!("line {}: self-loop at {u}", lineno + 1)));
                    }
                    let (a, b) = (id(&mut g, u), id(&mut g, v));
                    g.adjacency[a].insert(b);
                    g.adjacency[b].insert(a);
                }
                _ => return Err(PursuitError::InvalidGraph(format!("line {}: expected `u v`", lineno + 1))),
            }
        }
        g.check()?;
        Ok(g)
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Graph {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(a, b) in edges {
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        Graph { names: (0..n).map(|i| i.to_string()).collect(), adjacency }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn check(&self) -> Result<(), PursuitError> {
        if self.is_empty() {
            return Err(PursuitError::InvalidGraph("no vertices".into()));
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(PursuitError::InvalidGraph(format!("vertex {} is unreachable", self.names[v])));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PursuitVariant {
    Kind,
    Degree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observation {
    /// Each player sees only its own vertex (and whether capture happened).
    OwnPosition,
    /// Both positions are public.
    Full,
}

#[derive(Debug, Clone)]
pub struct PursuitParams {
    pub graph: Graph,
    pub variant: PursuitVariant,
    pub pursuer_start: usize,
    pub evader_start: usize,
    pub observation: Observation,
    /// If set, play ends (absorbing, no further payoff) after this many stages.
    pub horizon_cap: Option<usize>,
}

const CAUGHT: &str = "caught";
const ENDED: &str = "ended";

fn moves(g: &Graph, v: usize) -> Vec<(String, usize)> {
    std::iter::once(("stay".to_string(), v))
        .chain(g.adjacency[v].iter().map(|&w| (format!("to{}", g.names[w]), w)))
        .collect()
}

pub fn build_pursuit_grid(params: &PursuitParams) -> Result<GameSpec, PursuitError> {
    let g = &params.graph;
    g.check()?;
    for v in [params.pursuer_start, params.evader_start] {
        if v >= g.len() {
            return Err(PursuitError::InvalidGraph(format!("start vertex {v} out of range")));
        }
    }
    let state = |p: usize, e: usize, t: Option<usize>| match t {
        Some(t) => format!("p{}-e{}-t{t}", g.names[p], g.names[e]),
        None => format!("p{}-e{}", g.names[p], g.names[e]),
    };
    let stages: Vec<Option<usize>> = match params.horizon_cap {
        Some(cap) => (0..cap).map(Some).collect(),
        None => vec![None],
    };
    let kind = params.variant == PursuitVariant::Kind;
    let one = Rational::one();
    let mut sb = SpecBuilder::new();
    for &t in &stages {
        for p in 0..g.len() {
            for e in 0..g.len() {
                // The Maximizer moves first in the action pair.
                let (pm, em) = (moves(g, p), moves(g, e));
                let names = |m: &[(String, usize)]| m.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>();
                let (max, min) = if kind { (names(&pm), names(&em)) } else { (names(&em), names(&pm)) };
                sb.state(&state(p, e, t), &max, &min);
            }
        }
    }
    for terminal in [Some(CAUGHT), params.horizon_cap.map(|_| ENDED)].into_iter().flatten() {
        sb.state(terminal, &["idle"], &["idle"]);
        sb.goto(terminal, "idle", "idle", terminal, terminal, terminal);
    }
    sb.initial_state(&state(params.pursuer_start, params.evader_start, stages[0]));
    for &t in &stages {
        let next_t = match t {
            Some(t) if t + 1 < params.horizon_cap.unwrap_or(0) => Some(Some(t + 1)),
            Some(_) => None,
            None => Some(None),
        };
        for p in 0..g.len() {
            for e in 0..g.len() {
                let here = state(p, e, t);
                for (pa, p2) in moves(g, p) {
                    for (ea, e2) in moves(g, e) {
                        let captured = p2 == e2 || (p2 == e && e2 == p);
                        let (a1, a2) = if kind { (&pa, &ea) } else { (&ea, &pa) };
                        let (next, s1, s2) = if captured {
                            (CAUGHT.to_string(), CAUGHT.to_string(), CAUGHT.to_string())
                        } else {
                            let next = match next_t {
                                Some(nt) => state(p2, e2, nt),
                                None => ENDED.to_string(),
                            };
                            let (mine, theirs) = if kind { (p2, e2) } else { (e2, p2) };
                            match params.observation {
                                Observation::OwnPosition => {
                                    (next, format!("at{}", g.names[mine]), format!("at{}", g.names[theirs]))
                                }
                                Observation::Full => {
                                    let both = format!("p{}e{}", g.names[p2], g.names[e2]);
                                    (next, both.clone(), both)
                                }
                            }
                        };
                        sb.goto(&here, a1, a2, &next, &s1, &s2);
                        let pays = if kind { captured } else { !captured };
                        if pays {
                            sb.payoff(&here, a1, a2, one.clone());
                        }
                    }
                }
            }
        }
    }
    // Survival pay is at most `cap`, so `cap + 1` is a strict bound.
    let bound = match (params.variant, params.horizon_cap) {
        (PursuitVariant::Degree, Some(cap)) => Some(Rational::from_integer(cap as i64 + 1)),
        _ => None,
    };
    sb.flags(true, bound);
    Ok(sb.build())
}
