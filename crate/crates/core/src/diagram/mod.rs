//! Cardinal invariants and the inequalities between them, stored as cited data.
//!
//! Nothing here proves anything about uncountable cardinals. The builtin
//! diagram records statements with a short pointer to where they are argued,
//! and `query` only composes what is stored: chains of provable `<=` edges,
//! plus consistency annotations that lift along such chains.
//!
//! The figure this diagram would normally come from is missing, so the edge
//! list is rebuilt from statements made in the running text.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("relation {from} -> {to} has no citation")]
    Uncited { from: String, to: String },
    #[error("relation {0} -> {0} is a self loop")]
    SelfLoop(String),
    #[error("provable inequalities contain a cycle")]
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantNode {
    pub id: String,
    pub label: String,
    pub definition: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `from <= to` is a theorem.
    ProvableLe,
    /// `from < to` holds in some model.
    ConsistentlyStrict,
    /// The relationship between the two is an open problem.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub from: String,
    pub to: String,
    pub kind: RelationKind,
    pub citation: String,
}

/// A stored fact that is not a single edge, e.g. an identity between minima.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub text: String,
    pub nodes: Vec<String>,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RawDiagram {
    nodes: Vec<InvariantNode>,
    relations: Vec<Relation>,
    #[serde(default)]
    statements: Vec<Statement>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawDiagram", into = "RawDiagram")]
pub struct Diagram {
    nodes: Vec<InvariantNode>,
    relations: Vec<Relation>,
    statements: Vec<Statement>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
    #[serde(skip)]
    graph: DiGraph<usize, usize>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.relations == other.relations && self.statements == other.statements
    }
}

impl Eq for Diagram {}

impl TryFrom<RawDiagram> for Diagram {
    type Error = DiagramError;
    fn try_from(raw: RawDiagram) -> Result<Self, DiagramError> {
        Diagram::new(raw.nodes, raw.relations, raw.statements)
    }
}

impl From<Diagram> for RawDiagram {
    fn from(d: Diagram) -> Self {
        RawDiagram { nodes: d.nodes, relations: d.relations, statements: d.statements }
    }
}

/// Problems found by [`lint`]; a diagram with none of these can be built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintIssue {
    pub relation: Option<usize>,
    pub message: String,
}

/// Check raw parts without building the graph.
pub fn lint(nodes: &[InvariantNode], relations: &[Relation], statements: &[Statement]) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    let mut seen = BTreeSet::new();
    for n in nodes {
        if !seen.insert(n.id.as_str()) {
            issues.push(LintIssue { relation: None, message: DiagramError::DuplicateNode(n.id.clone()).to_string() });
        }
    }
    for (i, r) in relations.iter().enumerate() {
        for id in [&r.from, &r.to] {
            if !seen.contains(id.as_str()) {
                issues.push(LintIssue { relation: Some(i), message: DiagramError::UnknownNode(id.clone()).to_string() });
            }
        }
        if r.citation.trim().is_empty() {
            issues.push(LintIssue {
                relation: Some(i),
                message: DiagramError::Uncited { from: r.from.clone(), to: r.to.clone() }.to_string(),
            });
        }
        if r.from == r.to {
            issues.push(LintIssue { relation: Some(i), message: DiagramError::SelfLoop(r.from.clone()).to_string() });
        }
    }
    for s in statements {
        if s.citation.trim().is_empty() {
            issues.push(LintIssue { relation: None, message: format!("statement `{}` has no citation", s.text) });
        }
        for id in &s.nodes {
            if !seen.contains(id.as_str()) {
                issues.push(LintIssue { relation: None, message: DiagramError::UnknownNode(id.clone()).to_string() });
            }
        }
    }
    issues
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `from <= to` follows from stored edges.
    ProvableLe,
    /// `to <= from` follows from stored edges.
    ProvableGe,
    /// Each strict order is consistent, so neither inequality is provable.
    ConsistentlyStrictBothWays,
    /// One strict order is known consistent; the other direction is not settled by the data.
    OneWayWithConsistency,
    /// Listed as open, or nothing is stored that bears on the pair.
    Open,
}

/// A way to see `CON(lower < upper)`: a stored strict pair `(x, y)` with
/// `lower <= x` and `y <= upper` provable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyNote {
    pub lower: String,
    pub upper: String,
    pub via: Relation,
    pub citations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub from: String,
    pub to: String,
    pub verdict: Verdict,
    /// Provable edges from the smaller invariant to the larger, for the `Provable*` verdicts.
    pub path: Vec<Relation>,
    pub consistency: Vec<ConsistencyNote>,
    pub open: Vec<Relation>,
}

impl QueryResult {
    pub fn citations(&self) -> Vec<&str> {
        self.path.iter().map(|r| r.citation.as_str()).collect()
    }
}

impl Diagram {
    pub fn new(nodes: Vec<InvariantNode>, relations: Vec<Relation>, statements: Vec<Statement>) -> Result<Self, DiagramError> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(DiagramError::DuplicateNode(n.id.clone()));
            }
        }
        let mut graph = DiGraph::new();
        for i in 0..nodes.len() {
            graph.add_node(i);
        }
        for (k, r) in relations.iter().enumerate() {
            let a = *index.get(&r.from).ok_or_else(|| DiagramError::UnknownNode(r.from.clone()))?;
            let b = *index.get(&r.to).ok_or_else(|| DiagramError::UnknownNode(r.to.clone()))?;
            if r.citation.trim().is_empty() {
                return Err(DiagramError::Uncited { from: r.from.clone(), to: r.to.clone() });
            }
            if a == b {
                return Err(DiagramError::SelfLoop(r.from.clone()));
            }
            if r.kind == RelationKind::ProvableLe {
                graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), k);
            }
        }
        for s in &statements {
            if s.citation.trim().is_empty() {
                return Err(DiagramError::Uncited { from: s.text.clone(), to: s.text.clone() });
            }
            if let Some(id) = s.nodes.iter().find(|id| !index.contains_key(*id)) {
                return Err(DiagramError::UnknownNode(id.clone()));
            }
        }
        if is_cyclic_directed(&graph) {
            return Err(DiagramError::Cyclic);
        }
        Ok(Diagram { nodes, relations, statements, index, graph })
    }

    pub fn nodes(&self) -> &[InvariantNode] {
        &self.nodes
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn node(&self, id: &str) -> Option<&InvariantNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    fn idx(&self, id: &str) -> Result<usize, DiagramError> {
        self.index.get(id).copied().ok_or_else(|| DiagramError::UnknownNode(id.to_string()))
    }

    /// Shortest chain of provable edges from `a` to `b`, ties broken by edge order.
    fn provable_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                let mut edges = Vec::new();
                let mut cur = b;
                while let Some((p, e)) = prev[cur] {
                    edges.push(e);
                    cur = p;
                }
                edges.reverse();
                return Some(edges);
            }
            let mut out: Vec<(usize, usize)> =
                self.graph.edges(NodeIndex::new(u)).map(|e| (*e.weight(), e.target().index())).collect();
            out.sort_unstable();
            for (e, v) in out {
                if !seen[v] {
                    seen[v] = true;
                    prev[v] = Some((u, e));
                    queue.push_back(v);
                }
            }
        }
        None
    }

    pub fn provable_le(&self, a: &str, b: &str) -> Result<bool, DiagramError> {
        let (a, b) = (self.idx(a)?, self.idx(b)?);
        Ok(self.provable_path(a, b).is_some())
    }

    /// Every stored strict pair that lifts to `CON(a < b)`.
    fn consistency_notes(&self, a: usize, b: usize) -> Vec<ConsistencyNote> {
        let mut notes = Vec::new();
        for r in self.relations.iter().filter(|r| r.kind == RelationKind::ConsistentlyStrict) {
            let (x, y) = (self.index[&r.from], self.index[&r.to]);
            let (Some(down), Some(up)) = (self.provable_path(a, x), self.provable_path(y, b)) else {
                continue;
            };
            let mut citations: Vec<String> = down.iter().map(|&e| self.relations[e].citation.clone()).collect();
            citations.push(r.citation.clone());
            citations.extend(up.iter().map(|&e| self.relations[e].citation.clone()));
            notes.push(ConsistencyNote {
                lower: self.nodes[a].id.clone(),
                upper: self.nodes[b].id.clone(),
                via: r.clone(),
                citations,
            });
        }
        notes
    }

    pub fn query(&self, from: &str, to: &str) -> Result<QueryResult, DiagramError> {
        let (a, b) = (self.idx(from)?, self.idx(to)?);
        let open: Vec<Relation> = self
            .relations
            .iter()
            .filter(|r| r.kind == RelationKind::Open && ((r.from == from && r.to == to) || (r.from == to && r.to == from)))
            .cloned()
            .collect();
        let up = self.consistency_notes(a, b);
        let down = self.consistency_notes(b, a);

        let (verdict, path, consistency) = if let Some(p) = self.provable_path(a, b) {
            (Verdict::ProvableLe, p, up)
        } else if let Some(p) = self.provable_path(b, a) {
            (Verdict::ProvableGe, p, down)
        } else {
            let verdict = if !open.is_empty() {
                Verdict::Open
            } else if !up.is_empty() && !down.is_empty() {
                Verdict::ConsistentlyStrictBothWays
            } else if !up.is_empty() || !down.is_empty() {
                Verdict::OneWayWithConsistency
            } else {
                Verdict::Open
            };
            (verdict, Vec::new(), up.into_iter().chain(down).collect())
        };
        Ok(QueryResult {
            from: from.to_string(),
            to: to.to_string(),
            verdict,
            path: path.into_iter().map(|e| self.relations[e].clone()).collect(),
            consistency,
            open,
        })
    }

    /// Graphviz rendering: solid edges for provable `<=`, dashed for
    /// consistent strictness, dotted for open problems.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph invariants {\n  rankdir=BT;\n  node [shape=box];\n");
        for n in &self.nodes {
            s.push_str(&format!("  \"{}\" [label=\"{}\"];\n", n.id, escape(&n.label)));
        }
        for r in &self.relations {
            let style = match r.kind {
                RelationKind::ProvableLe => "solid",
                RelationKind::ConsistentlyStrict => "dashed",
                RelationKind::Open => "dotted",
            };
            s.push_str(&format!("  \"{}\" -> \"{}\" [style={}, tooltip=\"{}\"];\n", r.from, r.to, style, escape(&r.citation)));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

const NODES: &[(&str, &str, &str)] = &[
    ("omega1", "ω₁", "the first uncountable cardinal"),
    ("continuum", "2^ω", "the size of the continuum"),
    ("e", "e", "least size of a family in ω^ω such that every ω-predictor is evaded by a member"),
    ("e_ell", "e_ℓ = e_Q", "evasion number for linear Z-predictors with rational coefficients"),
    ("e_k_countable", "e_K (K countable)", "evasion number for linear K-predictors over a countable field K"),
    ("e_k_finite", "e_K (K finite)", "evasion number for linear K-predictors over a finite field K"),
    ("e_ubd", "e_ubd", "least e_f over all f in ω^ω"),
    ("e_fin", "e_fin = e_n", "least e_n over n; equal to every e_n with n ≥ 2"),
    ("e_prime", "e′", "evasion number for generalized (D,E)-predictors"),
    ("se", "se", "least size of a subgroup of Z^ω exhibiting the Specker phenomenon"),
    ("b", "b", "least size of an unbounded family in ω^ω"),
    ("d", "d", "least size of a dominating family in ω^ω"),
    ("s", "s", "least size of a splitting family"),
    ("r", "r", "least size of an unsplittable (reaping) family"),
    ("p_inv", "p", "least size of a family with the strong finite intersection property and no pseudointersection"),
    ("add_L", "add(L)", "additivity of the null ideal"),
    ("cov_L", "cov(L)", "covering number of the null ideal"),
    ("unif_L", "unif(L)", "least size of a non-null set"),
    ("cof_L", "cof(L)", "cofinality of the null ideal"),
    ("add_M", "add(M)", "additivity of the meager ideal"),
    ("cov_M", "cov(M)", "covering number of the meager ideal"),
    ("unif_M", "unif(M)", "least size of a non-meager set"),
    ("cof_M", "cof(M)", "cofinality of the meager ideal"),
    ("unif_E", "unif(E)", "uniformity of the σ-ideal generated by closed null sets"),
    ("cov_E", "cov(E)", "covering number of the σ-ideal generated by closed null sets"),
    ("cov_I", "cov(I)", "least number of sets predicted by single predictors covering ω^ω"),
    ("cov_I_ell", "cov(I_ℓ)", "covering number of the ideal attached to linear predicting"),
    ("unif_I", "unif(I)", "uniformity of the ideal of sets predicted by countably many ω-predictors"),
    ("lambda_star", "λ*", "least size of a set in some ∏ f(n) not captured by a single n-slalom"),
];

const WELL_KNOWN: &str = "introduction: well-known classical inequalities";
const BLASS: &str = "introduction: Blass, add(L) <= e_ell <= add(M) and p <= e_ell";
const REMARKS: &str = "diagram remarks: inequalities not related to evasion";

const PROVABLE: &[(&str, &str, &str)] = &[
    ("omega1", "add_L", WELL_KNOWN),
    ("p_inv", "add_M", WELL_KNOWN),
    ("add_M", "b", WELL_KNOWN),
    ("b", "continuum", WELL_KNOWN),
    ("p_inv", "s", WELL_KNOWN),
    ("s", "continuum", WELL_KNOWN),
    ("add_L", "e_ell", BLASS),
    ("e_ell", "add_M", BLASS),
    ("p_inv", "e_ell", BLASS),
    ("e_ell", "e", "introduction: linear predictors are predictors, so e_ell <= e"),
    ("e_ell", "se", "introduction: Blass, e_ell <= se"),
    ("se", "b", "introduction: Blass, se <= b"),
    ("se", "unif_L", "introduction, second main theorem: se <= unif(L)"),
    ("se", "e_prime", "prime-power embeddings: theorem se <= e'"),
    ("e_prime", "unif_L", "generalized predictors: e' <= unif(L)"),
    ("e_prime", "unif_M", "generalized predictors: e' <= unif(M)"),
    ("e", "e_ubd", "bounded evasion: e <= e_ubd <= e_fin holds trivially"),
    ("e_ubd", "e_fin", "bounded evasion: e <= e_ubd <= e_fin holds trivially"),
    ("e_fin", "unif_E", "bounded evasion: predicted sets are countable unions of closed null sets"),
    ("unif_E", "unif_M", "bounded evasion: unif(E) <= unif(M), unif(L)"),
    ("unif_E", "unif_L", "bounded evasion: unif(E) <= unif(M), unif(L)"),
    ("e_k_countable", "e", "linear evasion over fields: e_K <= e for countable K"),
    ("e_k_finite", "e_fin", "linear evasion over fields: e_K <= e_|K|, and e_fin = e_n for every n"),
    ("add_L", "e_k_countable", "linear evasion over fields: Blass' bounds carry over, e_K >= add(L), p"),
    ("p_inv", "e_k_countable", "linear evasion over fields: Blass' bounds carry over, e_K >= add(L), p"),
    ("add_L", "e_k_finite", "linear evasion over fields: Blass' bounds carry over, e_K >= add(L), p"),
    ("p_inv", "e_k_finite", "linear evasion over fields: Blass' bounds carry over, e_K >= add(L), p"),
    ("e_k_countable", "add_M", "linear evasion over fields: e_K <= add(M) for countable K"),
    ("e_k_countable", "b", "Luzin groups: the generalized Luzin group of size b gives e_K <= b"),
    ("s", "e_fin", "splitting-set lemma: e_fin >= s"),
    ("s", "e_k_finite", "splitting-set lemma: e_K >= s for finite K"),
    ("lambda_star", "e_ubd", "slalom evasion: rewriting Blass' argument gives lambda* <= e_ubd"),
    ("e", "d", "slalom evasion: Blass, e <= d"),
    ("e", "unif_I", "evasion ideals: proposition unif(I_X) >= e_X, here for X = ω^ω"),
    ("cov_I", "cov_I_ell", "diagram remarks: cov(I) <= cov(I_ell), dual to e_ell <= e"),
    ("add_M", "unif_E", REMARKS),
    ("cov_E", "cof_M", REMARKS),
    ("b", "unif_M", REMARKS),
    ("cov_M", "d", REMARKS),
    ("cov_L", "unif_M", REMARKS),
    ("cov_M", "unif_L", REMARKS),
    ("b", "r", REMARKS),
    ("s", "d", REMARKS),
];

const THEOREM_A: &str = "introduction, first main theorem: CON(e = omega1 < b = add(M) = continuum)";

const STRICT: &[(&str, &str, &str)] = &[
    ("e", "b", THEOREM_A),
    ("e", "add_M", THEOREM_A),
    ("e_ell", "add_M", THEOREM_A),
    ("p_inv", "e_ell", "introduction: standard techniques give CON(p, add(L) < e_ell)"),
    ("add_L", "e_ell", "introduction: standard techniques give CON(p, add(L) < e_ell)"),
    ("se", "b", "introduction, second main theorem: se < b is consistent"),
    ("se", "unif_L", "prime-power embeddings: over a model of MA, se <= e' <= unif(L) = omega1 < b"),
    ("e", "e_ubd", "introduction, third main theorem: e < e_ubd is consistent"),
    ("e_ubd", "e_fin", "bounded evasion: Blass' min{e, b} <= add(M) yields CON(e_fin > e_ubd) in the Mathias model"),
    ("add_L", "e_k_countable", "linear evasion over fields: finite support iteration of a generic linear predictor"),
    ("s", "e_k_countable", "linear evasion over fields: finite support iteration of a generic linear predictor"),
    ("p_inv", "e_k_countable", "linear evasion over fields: finite support iteration of a generic linear predictor"),
    ("add_L", "e", "linear evasion over fields: finite support iteration of a generic linear predictor"),
    ("s", "e", "linear evasion over fields: finite support iteration of a generic linear predictor"),
    ("d", "e_ubd", "slalom evasion: CON(e_ubd = continuum = omega2 and d = omega1)"),
    ("d", "lambda_star", "slalom evasion: Shelah, CON(lambda* = continuum = omega2 and d = omega1)"),
];

const OPEN: &[(&str, &str, &str)] = &[
    ("se", "add_M", "questions list: is se <= add(M), and is se < add(M) consistent"),
    ("e_prime", "add_M", "questions list: is min{e', b} <= add(M), and is e' < add(M) consistent"),
    ("e", "b", "questions list: clarify the relationship between e and b (Blass)"),
    ("e_ell", "e", "questions list and diagram remarks: strictness of e_ell <= e is unclear"),
    ("cov_I", "cov_I_ell", "diagram remarks: strictness of cov(I) <= cov(I_ell) is unclear"),
    ("e_k_finite", "e_fin", "questions list: relationship between e_K for finite K and e_fin"),
    ("e_k_finite", "e_k_countable", "questions list: relationship between the different e_K"),
    ("e", "unif_I", "questions list: is e_X = unif(I_X)"),
];

/// The inequality diagram assembled from the running text.
pub fn load_builtin_diagram() -> Diagram {
    let nodes = NODES
        .iter()
        .map(|&(id, label, def)| InvariantNode { id: id.into(), label: label.into(), definition: def.into() })
        .collect();
    let mut relations = Vec::new();
    for (table, kind) in [(PROVABLE, RelationKind::ProvableLe), (STRICT, RelationKind::ConsistentlyStrict), (OPEN, RelationKind::Open)] {
        relations.extend(table.iter().map(|&(from, to, citation)| Relation {
            from: from.into(),
            to: to.into(),
            kind,
            citation: citation.into(),
        }));
    }
    let statements = vec![
        Statement {
            text: "e >= min{b, e_ubd}".into(),
            nodes: vec!["e".into(), "b".into(), "e_ubd".into()],
            citation: "predictor extension lemma: e >= min{b, e_ubd}".into(),
        },
        Statement {
            text: "min{b, e} = min{b, e_ubd}".into(),
            nodes: vec!["e".into(), "b".into(), "e_ubd".into()],
            citation: "predictor extension lemma combined with e <= e_ubd".into(),
        },
        Statement {
            text: "min{e, b} <= add(M)".into(),
            nodes: vec!["e".into(), "b".into(), "add_M".into()],
            citation: "bounded evasion: Blass, min{e, b} <= add(M)".into(),
        },
        Statement {
            text: "e_fin = e_n for every n >= 2".into(),
            nodes: vec!["e_fin".into()],
            citation: "reduction lemma: e_fin = e_n for all n".into(),
        },
        Statement {
            text: "does a strong Gross space over one finite field give one over every field".into(),
            nodes: vec!["e_k_finite".into(), "e_k_countable".into()],
            citation: "questions list: strong Gross spaces across fields".into(),
        },
    ];
    Diagram::new(nodes, relations, statements).expect("builtin diagram is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_lints_clean() {
        let d = load_builtin_diagram();
        assert!(lint(d.nodes(), d.relations(), d.statements()).is_empty());
        assert!(d.relations().iter().all(|r| !r.citation.trim().is_empty()));
    }

    #[test]
    fn required_edges_present() {
        let d = load_builtin_diagram();
        let has = |a: &str, b: &str| d.relations().iter().any(|r| r.kind == RelationKind::ProvableLe && r.from == a && r.to == b);
        for (a, b) in [
            ("add_L", "e_ell"),
            ("e_ell", "add_M"),
            ("p_inv", "e_ell"),
            ("se", "b"),
            ("e_ell", "se"),
            ("se", "e_prime"),
            ("e_prime", "unif_L"),
            ("e_prime", "unif_M"),
            ("e", "e_ubd"),
            ("e_ubd", "e_fin"),
            ("e_fin", "unif_E"),
            ("s", "e_fin"),
            ("s", "e_k_finite"),
            ("lambda_star", "e_ubd"),
            ("e", "d"),
            ("e", "unif_I"),
            ("se", "unif_L"),
            ("omega1", "add_L"),
        ] {
            assert!(has(a, b), "{a} <= {b}");
        }
    }

    #[test]
    fn add_l_below_add_m_via_e_ell() {
        let d = load_builtin_diagram();
        let q = d.query("add_L", "add_M").unwrap();
        assert_eq!(q.verdict, Verdict::ProvableLe);
        let ids: Vec<(&str, &str)> = q.path.iter().map(|r| (r.from.as_str(), r.to.as_str())).collect();
        assert_eq!(ids, vec![("add_L", "e_ell"), ("e_ell", "add_M")]);
        assert!(!q.consistency.is_empty());
    }

    #[test]
    fn e_versus_b_is_open() {
        let d = load_builtin_diagram();
        let q = d.query("e", "b").unwrap();
        assert_eq!(q.verdict, Verdict::Open);
        assert!(q.open.iter().any(|r| r.citation.starts_with("questions list")));
        // the strict order e < b is still reported as consistent
        assert!(q.consistency.iter().any(|n| n.lower == "e" && n.upper == "b"));
        assert_eq!(d.query("b", "e").unwrap().verdict, Verdict::Open);
    }

    #[test]
    fn e_ubd_below_e_fin_with_strictness() {
        let d = load_builtin_diagram();
        let q = d.query("e_ubd", "e_fin").unwrap();
        assert_eq!(q.verdict, Verdict::ProvableLe);
        assert!(q.consistency.iter().any(|n| n.via.from == "e_ubd" && n.via.to == "e_fin"));
        let r = d.query("e_fin", "e_ubd").unwrap();
        assert_eq!(r.verdict, Verdict::ProvableGe);
    }

    #[test]
    fn independent_pair() {
        let d = load_builtin_diagram();
        // CON(d < lambda*) is stored and nothing puts lambda* below d
        let q = d.query("d", "lambda_star").unwrap();
        assert_eq!(q.verdict, Verdict::OneWayWithConsistency);
        // se vs b: provable with a strictness note
        let q = d.query("se", "b").unwrap();
        assert_eq!(q.verdict, Verdict::ProvableLe);
        assert!(!q.consistency.is_empty());
    }

    #[test]
    fn unknown_node() {
        let d = load_builtin_diagram();
        assert_eq!(d.query("e", "nope"), Err(DiagramError::UnknownNode("nope".into())));
    }

    #[test]
    fn rejects_uncited_and_cycles() {
        let n = |id: &str| InvariantNode { id: id.into(), label: id.into(), definition: String::new() };
        let r = |a: &str, b: &str, c: &str| Relation { from: a.into(), to: b.into(), kind: RelationKind::ProvableLe, citation: c.into() };
        let uncited = Diagram::new(vec![n("a"), n("b")], vec![r("a", "b", " ")], vec![]);
        assert!(matches!(uncited, Err(DiagramError::Uncited { .. })));
        assert_eq!(lint(&[n("a"), n("b")], &[r("a", "b", "")], &[]).len(), 1);
        let cyc = Diagram::new(vec![n("a"), n("b")], vec![r("a", "b", "x"), r("b", "a", "y")], vec![]);
        assert_eq!(cyc, Err(DiagramError::Cyclic));
        let dup = Diagram::new(vec![n("a"), n("a")], vec![], vec![]);
        assert_eq!(dup, Err(DiagramError::DuplicateNode("a".into())));
    }

    #[test]
    fn every_path_edge_is_stored_and_chains() {
        let d = load_builtin_diagram();
        for a in d.nodes() {
            for b in d.nodes() {
                let q = d.query(&a.id, &b.id).unwrap();
                if matches!(q.verdict, Verdict::ProvableLe) && a.id != b.id {
                    assert_eq!(q.path.first().unwrap().from, a.id);
                    assert_eq!(q.path.last().unwrap().to, b.id);
                    assert!(q.path.windows(2).all(|w| w[0].to == w[1].from));
                    assert!(q.path.iter().all(|r| d.relations().contains(r)));
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_and_dot() {
        let d = load_builtin_diagram();
        let s = serde_json::to_string(&d).unwrap();
        let back: Diagram = serde_json::from_str(&s).unwrap();
        assert_eq!(back.query("add_L", "add_M").unwrap(), d.query("add_L", "add_M").unwrap());
        let dot = d.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("\"add_L\" -> \"e_ell\" [style=solid"));
        assert_eq!(dot, d.to_dot());
    }
}
