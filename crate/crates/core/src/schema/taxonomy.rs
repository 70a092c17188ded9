//! The built-in annotation taxonomy.
//!
//! The tree is static and immutable. Every node gets a dense index at
//! construction time, and a [`LabelId`] is just that index, so labels are
//! `Copy`, cheap to compare and totally ordered by their position in a
//! depth-first walk of the tree.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Top-level category groups of the schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    SupportingFact,
    AnswerType,
    Correctness,
    Reasoning,
    Knowledge,
    LinguisticComplexity,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::SupportingFact,
        Family::AnswerType,
        Family::Correctness,
        Family::Reasoning,
        Family::Knowledge,
        Family::LinguisticComplexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SupportingFact => "SupportingFact",
            Family::AnswerType => "AnswerType",
            Family::Correctness => "Correctness",
            Family::Reasoning => "Reasoning",
            Family::Knowledge => "Knowledge",
            Family::LinguisticComplexity => "LinguisticComplexity",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown label path `{0}`")]
    UnknownPath(String),
    #[error("empty label path")]
    Empty,
}

/// A node of the taxonomy tree, addressed by its slash-joined path
/// (`Reasoning/Operational/Bridge`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(u16);

impl LabelId {
    /// Resolves a path of category names from the root down.
    pub fn from_path<S: AsRef<str>>(path: &[S]) -> Result<Self, LabelError> {
        taxonomy().lookup(path)
    }

    /// Parses a slash-joined path.
    pub fn parse(path: &str) -> Result<Self, LabelError> {
        let parts: Vec<&str> = path.split('/').collect();
        taxonomy()
            .lookup(&parts)
            .map_err(|_| LabelError::UnknownPath(path.to_string()))
    }

    pub fn node(self) -> &'static Node {
        &taxonomy().nodes[self.0 as usize]
    }

    pub fn name(self) -> &'static str {
        self.node().name
    }

    pub fn display_name(self) -> &'static str {
        self.node().display
    }

    pub fn is_leaf(self) -> bool {
        self.node().children.is_empty()
    }

    pub fn family(self) -> Family {
        self.node().family
    }

    pub fn parent(self) -> Option<LabelId> {
        self.node().parent
    }

    pub fn depth(self) -> usize {
        self.path().len() - 1
    }

    /// Names from the family root down to this node.
    pub fn path(self) -> Vec<&'static str> {
        let mut out = vec![self.name()];
        let mut cur = self.parent();
        while let Some(p) = cur {
            out.push(p.name());
            cur = p.parent();
        }
        out.reverse();
        out
    }

    pub fn path_string(self) -> String {
        self.path().join("/")
    }

    /// True when `self` equals `ancestor` or lies below it.
    pub fn is_within(self, ancestor: LabelId) -> bool {
        let mut cur = Some(self);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = c.parent();
        }
        false
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.path_string())
    }
}

impl fmt::Debug for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelId({})", self.path_string())
    }
}

impl FromStr for LabelId {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LabelId::parse(s)
    }
}

impl Serialize for LabelId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.path_string())
    }
}

impl<'de> Deserialize<'de> for LabelId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LabelId::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug)]
pub struct Node {
    pub id: LabelId,
    pub name: &'static str,
    pub display: &'static str,
    pub family: Family,
    pub parent: Option<LabelId>,
    pub children: Vec<LabelId>,
    /// Short annotation guideline for the node.
    pub guideline: &'static str,
}

#[derive(Debug)]
pub struct Taxonomy {
    nodes: Vec<Node>,
    roots: Vec<LabelId>,
}

impl Taxonomy {
    pub fn roots(&self) -> &[LabelId] {
        &self.roots
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn root(&self, family: Family) -> LabelId {
        self.roots[Family::ALL.iter().position(|f| *f == family).unwrap()]
    }

    pub fn lookup<S: AsRef<str>>(&self, path: &[S]) -> Result<LabelId, LabelError> {
        let (first, rest) = path.split_first().ok_or(LabelError::Empty)?;
        let unknown = || {
            LabelError::UnknownPath(
                path.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join("/"),
            )
        };
        let mut cur = *self
            .roots
            .iter()
            .find(|r| r.name() == first.as_ref())
            .ok_or_else(unknown)?;
        for seg in rest {
            cur = *cur
                .node()
                .children
                .iter()
                .find(|c| c.name() == seg.as_ref())
                .ok_or_else(unknown)?;
        }
        Ok(cur)
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.nodes.iter().filter(|n| n.children.is_empty()).map(|n| n.id)
    }

    pub fn leaves_of(&self, family: Family) -> impl Iterator<Item = LabelId> + '_ {
        self.leaves().filter(move |l| l.family() == family)
    }

    /// All nodes of a family in depth-first order, the root first.
    pub fn subtree(&self, family: Family) -> impl Iterator<Item = LabelId> + '_ {
        self.nodes.iter().filter(move |n| n.family == family).map(|n| n.id)
    }
}

struct Spec {
    name: &'static str,
    display: &'static str,
    guideline: &'static str,
    children: Vec<Spec>,
}

fn leaf(name: &'static str, display: &'static str, guideline: &'static str) -> Spec {
    Spec { name, display, guideline, children: Vec::new() }
}

fn group(
    name: &'static str,
    display: &'static str,
    guideline: &'static str,
    children: Vec<Spec>,
) -> Spec {
    Spec { name, display, guideline, children }
}

const NO_GUIDELINE: &str = "guideline absent in source";

fn tree() -> Vec<Spec> {
    vec![
        leaf(
            "SupportingFact",
            "Supporting Fact",
            "Mark every sentence that contains evidence required to produce the expected answer. \
             Recorded as sentence references, not as a label.",
        ),
        group(
            "AnswerType",
            "Answer",
            "Form of the expected answer relative to the context.",
            vec![
                leaf("Span", "Span", "The answer is a continuous span taken from the passage."),
                leaf("Paraphrasing", "Paraphrasing", "The answer paraphrases a span of the passage."),
                leaf(
                    "Generated",
                    "Abstraction",
                    "The answer fits none of the other types. Restating the question or \
                     combining several span or paraphrase answers does not qualify.",
                ),
                leaf("Unanswerable", "Unanswerable", "No answer is present in the context."),
            ],
        ),
        group(
            "Correctness",
            "Factual Correctness",
            "Problems with the factual correctness of the expected answer. \
             Add a note with the alternatives.",
            vec![
                group(
                    "Debatable",
                    "Debatable",
                    "Multiple plausible answers, contradicting expected answers, or an answer that \
                     is not specific enough while a more specific one is present.",
                    vec![
                        leaf(
                            "ArbitrarySelection",
                            "Arbitrary Selection",
                            "Several equally valid answers exist and one was picked arbitrarily.",
                        ),
                        leaf(
                            "ArbitraryPrecision",
                            "Arbitrary Precision",
                            "The expected answer is more or less precise than the question warrants.",
                        ),
                        leaf(
                            "ConjunctionOrIsolated",
                            "Conjunction or Isolated",
                            "Answer choices are only correct in conjunction, or correct in isolation \
                             but not together.",
                        ),
                        leaf("Other", "Other", "Any other reason for the answer being debatable."),
                    ],
                ),
                group(
                    "Wrong",
                    "Wrong",
                    "The expected answer is factually wrong.",
                    vec![
                        leaf(
                            "AnswerPresent",
                            "Answer Present",
                            "A correct answer is present in the context.",
                        ),
                        leaf("Other", "Other", "Any other reason for the answer being wrong."),
                    ],
                ),
            ],
        ),
        group(
            "Reasoning",
            "Reasoning",
            "Reasoning required to obtain the answer. Not annotated when the answer is directly \
             stated in the passage; use Retrieval instead.",
            vec![
                group(
                    "Operational",
                    "Operations",
                    "Operational logic as in semantic parsing, typically multi-hop.",
                    vec![
                        leaf(
                            "Bridge",
                            "Bridge",
                            "Information from different sentences joined by a common entity.",
                        ),
                        leaf(
                            "Comparison",
                            "Comparison",
                            "A comparison of several entities' properties is required.",
                        ),
                        leaf(
                            "Constraint",
                            "Constraint",
                            "The answer is an entity satisfying a constraint from the question.",
                        ),
                        leaf(
                            "Intersection",
                            "Intersection",
                            "The answer is the intersection of several entities' properties.",
                        ),
                    ],
                ),
                group(
                    "Arithmetic",
                    "Mathematics",
                    "Simple mathematical operations.",
                    vec![
                        leaf("Subtraction", "Subtraction", "Subtraction of numbers."),
                        leaf("Addition", "Addition", "Addition of numbers."),
                        leaf("Ordering", "Ordering", "Ordering of numerical values."),
                        leaf("Counting", "Counting", "Counting of entities or events."),
                        leaf("OtherMath", "Other Arithmetic", "Other simple mathematical operations."),
                    ],
                ),
                group(
                    "Linguistic",
                    "Linguistics",
                    "Understanding of logical operators expressed in language.",
                    vec![
                        leaf("Negation", "Negation", "Understanding of negation is required."),
                        leaf(
                            "Quantifiers",
                            "Quantifiers",
                            "Understanding of quantifiers such as every, some or all.",
                        ),
                        leaf("Conditional", "Conditionals", "Understanding of if-then statements."),
                        leaf("Monotonicity", "Monotonicity", NO_GUIDELINE),
                        leaf(
                            "ConDisjunction",
                            "Con-/Disjunction",
                            "Logical implications of and/or.",
                        ),
                    ],
                ),
                leaf("Temporal", "Temporal", "Temporal succession of events."),
                leaf("Spatial", "Spatial", "Reasoning about directions and environment."),
                leaf("Causal", "Causal", "Cause-effect relationship between events."),
                leaf(
                    "ByExclusion",
                    "By Exclusion",
                    "A (multiple-choice) answer that is only obtained by excluding every alternative.",
                ),
                leaf(
                    "Retrieval",
                    "Retrieval",
                    "The answer is directly stated in the passage; no reasoning required.",
                ),
            ],
        ),
        group(
            "Knowledge",
            "Knowledge",
            "Background knowledge required beyond the context.",
            vec![
                group(
                    "Factual",
                    "World",
                    "Factual knowledge expressible as a set of facts.",
                    vec![
                        leaf("CulturalHistoric", "Cultural/Historic", "Cultural or historic facts."),
                        leaf(
                            "GeoPoliticalLegal",
                            "(Geo)Political/Legal",
                            "Geographical, political or legal facts.",
                        ),
                        leaf(
                            "TechnicalScientific",
                            "Technical/Scientific",
                            "Technical or scientific facts.",
                        ),
                        leaf(
                            "OtherDomainSpecific",
                            "Other Domain Specific",
                            "Facts from any other specific domain.",
                        ),
                    ],
                ),
                leaf(
                    "Intuitive",
                    "Intuitive",
                    "Knowledge that is hard to express as a set of facts.",
                ),
            ],
        ),
        group(
            "LinguisticComplexity",
            "Linguistic Complexity",
            "Features that introduce variance between supporting facts and the question.",
            vec![
                group(
                    "LexicalVariety",
                    "Lexical Variety",
                    "Lexical semantics.",
                    vec![
                        leaf(
                            "Redundancy",
                            "Redundancy",
                            "Redundant words that do not alter the meaning for answer retrieval.",
                        ),
                        leaf(
                            "LexicalEntailment",
                            "Lexical Entailment",
                            "Understanding of words' semantic fields.",
                        ),
                        leaf(
                            "Dative",
                            "Dative",
                            "A dative case substitutes the use of a preposition.",
                        ),
                        leaf(
                            "SynonymParaphrase",
                            "Synonym/Paraphrase",
                            "Synonyms and paraphrases with respect to the question wording.",
                        ),
                        leaf(
                            "Abbreviation",
                            "Abbreviation",
                            "Abbreviations of concepts introduced in the question, or vice versa.",
                        ),
                        leaf("Symmetry", "Symmetry", "Symmetric relations or collectives."),
                    ],
                ),
                group(
                    "SyntacticVariety",
                    "Syntactic Variety",
                    "Syntax.",
                    vec![
                        leaf(
                            "Nominalisation",
                            "Nominalisation",
                            "Change from nominal to verbal style or vice versa.",
                        ),
                        leaf(
                            "Genitive",
                            "Genitive",
                            "A genitive case substituted with a preposition.",
                        ),
                        leaf("Voice", "Voice", "Change between passive and active voice."),
                    ],
                ),
                group(
                    "LexicalAmbiguity",
                    "Lexical Ambiguity",
                    "Features that add ambiguity to the supporting facts.",
                    vec![
                        leaf(
                            "Restrictivity",
                            "Restrictivity",
                            "Modifiers whose presence changes the meaning regarding the answer.",
                        ),
                        leaf(
                            "Factivity",
                            "Factivity",
                            "Factivity modifiers that change the meaning regarding the answer.",
                        ),
                        leaf(
                            "Coreference",
                            "Coreference",
                            "Intra- or inter-sentence coreference relevant to the question.",
                        ),
                        leaf(
                            "EllipsisImplicit",
                            "Ellipse/Implicit",
                            "Information only expressed implicitly, e.g. by an ellipsis.",
                        ),
                    ],
                ),
                group(
                    "SyntacticAmbiguity",
                    "Syntactic Ambiguity",
                    "Ambiguous syntactic features whose resolution is required.",
                    vec![
                        leaf("Preposition", "Preposition", "Ambiguous prepositional attachment."),
                        leaf(
                            "Listing",
                            "Listing",
                            "Argument collection with con- and disjunctions.",
                        ),
                        leaf(
                            "CoordinationScope",
                            "Scope",
                            "Ambiguous coordination scope.",
                        ),
                        leaf(
                            "RelAdvApp",
                            "Relative",
                            "Relative clauses, adverbial phrases or appositions.",
                        ),
                    ],
                ),
            ],
        ),
    ]
}

fn build() -> Taxonomy {
    fn push(
        spec: Spec,
        family: Family,
        parent: Option<LabelId>,
        nodes: &mut Vec<Node>,
    ) -> LabelId {
        let id = LabelId(u16::try_from(nodes.len()).expect("taxonomy fits in u16"));
        nodes.push(Node {
            id,
            name: spec.name,
            display: spec.display,
            family,
            parent,
            children: Vec::new(),
            guideline: spec.guideline,
        });
        for child in spec.children {
            let cid = push(child, family, Some(id), nodes);
            nodes[id.0 as usize].children.push(cid);
        }
        id
    }

    let mut nodes = Vec::new();
    let mut roots = Vec::new();
    for (spec, family) in tree().into_iter().zip(Family::ALL) {
        debug_assert_eq!(spec.name, family.name());
        roots.push(push(spec, family, None, &mut nodes));
    }
    Taxonomy { nodes, roots }
}

static TAXONOMY: LazyLock<Taxonomy> = LazyLock::new(build);

/// The immutable built-in taxonomy.
pub fn taxonomy() -> &'static Taxonomy {
    &TAXONOMY
}
