//! From dependency predicates to metamorphic relations.

mod change;
mod formula;
mod mr;
mod transform;

pub use change::infer_expected_change;
pub use formula::{
    build_formula, fmt_number, Behavior, Change, ChangePropositions, Conjunct, Evaluation,
    ExpectedChangeFormula, Lhs, Modifier, Op, Pair, Quantity, Unit,
};
pub use mr::{analyze_rule, build_mr, parse_rule, MetamorphicRelation, MrBlock, ParsedBlock, ParsedRule};
pub use transform::{
    infer_transformation, resolve_pronoun, ClauseContext, Position, ReplaceKind,
    TransformationKind, TransformationProposition,
};

use crate::rule_lang::RuleError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InferenceError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("NoTransformationMatched: {0:?} is not a known transformation verb")]
    NoTransformationMatched(String),
    #[error("NoOntologyMatch: {0:?} matches no ontology element")]
    NoOntologyMatch(String),
    #[error("MissingReference: {0:?} needs a reference element")]
    MissingReference(String),
    #[error("UnresolvedPronoun: no antecedent for {0:?}")]
    UnresolvedPronoun(String),
    #[error("NoChangeMatched: no expected change in {0:?}")]
    NoChangeMatched(String),
    #[error("InvalidChange: {0}")]
    InvalidChange(String),
    #[error("InvalidReplace: {0}")]
    InvalidReplace(String),
    #[error("TooManyBlocks: rules hold one or two if/then blocks, found {0}")]
    TooManyBlocks(usize),
}

impl InferenceError {
    /// Pipeline stage that failed.
    pub fn stage(&self) -> &'static str {
        match self {
            InferenceError::Rule(RuleError::MalformedRule(_)) => "tokenize",
            InferenceError::Rule(RuleError::NoRootVerb(_)) => "tag",
            InferenceError::NoOntologyMatch(_) | InferenceError::UnresolvedPronoun(_) => "ontology",
            _ => "inference",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Thresholds;
    use crate::ontology::Ontology;

    const R1: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.";
    const R2: &str = "If: a speed limit sign appears on the roadside,\nThen: the ego-vehicle should slow down.";
    const R3: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down at least 30%.";
    const R4: &str = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down.\nIf: he gets closer to the ego-vehicle,\nThen: the speed should decrease more.";
    const R5: &str = "If: lane lines are removed from the road,\nThen: the steering angle of ego-vehicle should keep the same.";
    const R6: &str = "If: the buildings are replaced with trees,\nThen: the steering angle of ego-vehicle should keep the same.";
    const R7: &str = "If: the driving time changes into night,\nThen: the ego-vehicle should slow down.";

    fn mr(text: &str) -> MetamorphicRelation {
        parse_rule(text, &Ontology::builtin(), &Thresholds::default())
            .unwrap_or_else(|e| panic!("{text}: {e}"))
            .mr
    }

    fn summary(text: &str) -> Vec<String> {
        mr(text)
            .blocks
            .iter()
            .map(|b| format!("{} : {}", b.proposition, b.formula))
            .collect()
    }

    #[test]
    fn reference_rules() {
        assert_eq!(summary(R1), ["add(pedestrian, sidewalk, on) : x1-x2 > 0 (speed)"]);
        assert_eq!(
            summary(R2),
            ["add(traffic sign{type=speed limit}, sidewalk, on) : x1-x2 > 0 (speed)"]
        );
        assert_eq!(summary(R3), ["add(pedestrian, sidewalk, on) : (x1-x2)/x1 >= 0.3 (speed)"]);
        assert_eq!(
            summary(R4),
            [
                "add(pedestrian, sidewalk, on) : x1-x2 > 0 (speed)",
                "add(pedestrian, sidewalk, on, closer) : x2-x3 > 0 (speed)"
            ]
        );
        assert_eq!(summary(R5), ["remove(line) : |x1-x2| <= 1.39 (steering)"]);
        assert_eq!(
            summary(R6),
            ["replace(building, tree, object) : |x1-x2| <= 1.39 (steering)"]
        );
        assert_eq!(
            summary(R7),
            ["replace(time{period=day}, time{period=night}, time) : x1-x2 > 0 (speed)"]
        );
    }

    #[test]
    fn canonical_json() {
        assert_eq!(
            mr(R1).to_canonical_json(),
            r#"{"blocks":[{"proposition":{"kind":"add","target":{"element":"pedestrian","properties":{}},"reference":{"element":"sidewalk","properties":{}},"position":"on","comparative":null},"formula":{"behavior":"speed","conjuncts":[{"lhs":"x1-x2","op":">","rhs":0}]}}]}"#
        );
        assert!(mr(R3).to_canonical_json().contains(r#""rhs":0.3"#));
        assert!(mr(R6).to_canonical_json().contains(r#""replace_kind":"object""#));
    }

    #[test]
    fn sentence_form_and_determinism() {
        let a = mr("If a pedestrian appears on the roadside, then the ego-vehicle should slow down.");
        assert_eq!(a.blocks, mr(R1).blocks);
        assert_eq!(mr(R4).to_canonical_json(), mr(R4).to_canonical_json());
    }

    #[test]
    fn pronouns() {
        use crate::rule_lang::{tokenize, Pos};
        let o = Ontology::builtin();
        let car = {
            let mut t = tokenize("vehicle").remove(0);
            t.pos = Pos::Noun;
            crate::ontology::match_element(&t, &o, 0.75).unwrap()
        };
        let mut she = tokenize("she").remove(0);
        she.pos = Pos::Pron;
        assert!(matches!(
            resolve_pronoun(&she, std::slice::from_ref(&car)),
            Err(InferenceError::UnresolvedPronoun(_))
        ));
        let mut it = tokenize("it").remove(0);
        it.pos = Pos::Pron;
        assert_eq!(resolve_pronoun(&it, &[car]).unwrap().element.name, "vehicle");
    }

    #[test]
    fn inference_errors() {
        let o = Ontology::builtin();
        let t = Thresholds::default();
        let err = |s: &str| parse_rule(s, &o, &t).unwrap_err();
        assert!(matches!(
            err("If: a pedestrian walks on the roadside, Then: the ego-vehicle should slow down"),
            InferenceError::NoTransformationMatched(_)
        ));
        assert!(matches!(
            err("If: a unicorn appears on the roadside, Then: the ego-vehicle should slow down"),
            InferenceError::NoOntologyMatch(_)
        ));
        assert!(matches!(
            err("If: a pedestrian appears, Then: the ego-vehicle should slow down"),
            InferenceError::MissingReference(_)
        ));
        assert!(matches!(
            err("If: purple happiness, Then: the ego-vehicle should slow down"),
            InferenceError::Rule(RuleError::NoRootVerb(_))
        ));
        assert!(matches!(
            err("If: the buildings are replaced with night, Then: the ego-vehicle should slow down"),
            InferenceError::InvalidReplace(_)
        ));
    }
}
