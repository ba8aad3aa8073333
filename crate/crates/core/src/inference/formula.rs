//! Expected-change propositions and the formulas they compile to.

use std::fmt;

use serde::Serialize;

use crate::config::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Change {
    Increase,
    Decrease,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    AtLeast,
    MoreThan,
    LessThan,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Absolute,
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Behavior {
    Speed,
    Steering,
}

impl Behavior {
    pub fn as_str(self) -> &'static str {
        match self {
            Behavior::Speed => "speed",
            Behavior::Steering => "steering",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "speed" => Some(Behavior::Speed),
            "steering" | "steering_angle" | "steering angle" => Some(Behavior::Steering),
            _ => None,
        }
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The then-side of one block before it is compiled to a formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangePropositions {
    pub change: Change,
    pub modifier: Modifier,
    pub quantity: Option<Quantity>,
    pub negated: bool,
    pub comparative_more: bool,
    pub behavior: Behavior,
}

impl ChangePropositions {
    pub fn simple(change: Change, behavior: Behavior) -> Self {
        Self {
            change,
            modifier: Modifier::None,
            quantity: None,
            negated: false,
            comparative_more: false,
            behavior,
        }
    }

    /// `same` carries no modifier or quantity, and a quantity needs a modifier.
    pub fn is_valid(&self) -> bool {
        let quantity_ok = self
            .quantity
            .is_none_or(|q| q.value.is_finite() && q.value >= 0.0);
        match self.change {
            Change::Same => self.modifier == Modifier::None && self.quantity.is_none(),
            _ => quantity_ok && (self.quantity.is_some() == (self.modifier != Modifier::None)),
        }
    }
}

/// Left-hand side of a conjunct over an ordered prediction pair (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lhs {
    /// a − b
    Drop,
    /// b − a
    Rise,
    /// (a − b) / a
    RelDrop,
    /// (b − a) / a
    RelRise,
    /// |a − b|
    AbsDiff,
}

impl Lhs {
    pub fn is_relative(self) -> bool {
        matches!(self, Lhs::RelDrop | Lhs::RelRise)
    }

    /// None when a relative form meets a zero denominator.
    pub fn eval(self, a: f64, b: f64) -> Option<f64> {
        match self {
            Lhs::Drop => Some(a - b),
            Lhs::Rise => Some(b - a),
            Lhs::RelDrop if a != 0.0 => Some((a - b) / a),
            Lhs::RelRise if a != 0.0 => Some((b - a) / a),
            Lhs::RelDrop | Lhs::RelRise => None,
            Lhs::AbsDiff => Some((a - b).abs()),
        }
    }

    pub fn render(self, a: &str, b: &str) -> String {
        match self {
            Lhs::Drop => format!("{a}-{b}"),
            Lhs::Rise => format!("{b}-{a}"),
            Lhs::RelDrop => format!("({a}-{b})/{a}"),
            Lhs::RelRise => format!("({b}-{a})/{a}"),
            Lhs::AbsDiff => format!("|{a}-{b}|"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Gt,
    Lt,
    Ge,
    Le,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Gt => ">",
            Op::Lt => "<",
            Op::Ge => ">=",
            Op::Le => "<=",
        }
    }

    pub fn holds(self, l: f64, r: f64) -> bool {
        match self {
            Op::Gt => l > r,
            Op::Lt => l < r,
            Op::Ge => l >= r,
            Op::Le => l <= r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjunct {
    pub lhs: Lhs,
    pub op: Op,
    pub rhs: f64,
}

impl Conjunct {
    pub fn new(lhs: Lhs, op: Op, rhs: f64) -> Self {
        Self { lhs, op, rhs }
    }

    pub fn render(&self, a: &str, b: &str) -> String {
        format!("{} {} {}", self.lhs.render(a, b), self.op.as_str(), fmt_number(self.rhs))
    }
}

/// Which predictions a block's formula compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Pair {
    /// Source and first follow-up.
    #[default]
    X1X2,
    /// First and second follow-up of a chained relation.
    X2X3,
}

impl Pair {
    pub fn names(self) -> (&'static str, &'static str) {
        match self {
            Pair::X1X2 => ("x1", "x2"),
            Pair::X2X3 => ("x2", "x3"),
        }
    }
}

/// Outcome of evaluating a formula on one prediction pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Holds,
    /// Index of the first conjunct that failed.
    Fails(usize),
    /// A relative conjunct had a zero denominator.
    Degenerate(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedChangeFormula {
    pub behavior: Behavior,
    pub conjuncts: Vec<Conjunct>,
    pub pair: Pair,
}

impl ExpectedChangeFormula {
    pub fn evaluate(&self, a: f64, b: f64) -> Evaluation {
        for (i, c) in self.conjuncts.iter().enumerate() {
            match c.lhs.eval(a, b) {
                None => return Evaluation::Degenerate(i),
                Some(l) if !c.op.holds(l, c.rhs) => return Evaluation::Fails(i),
                Some(_) => {}
            }
        }
        Evaluation::Holds
    }

    pub fn render_conjunct(&self, i: usize) -> String {
        let (a, b) = self.pair.names();
        self.conjuncts[i].render(a, b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (a, b) = self.pair.names();
        serde_json::json!({
            "behavior": self.behavior.as_str(),
            "conjuncts": self.conjuncts.iter().map(|c| serde_json::json!({
                "lhs": c.lhs.render(a, b),
                "op": c.op.as_str(),
                "rhs": number_value(c.rhs),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for ExpectedChangeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.conjuncts.len())
            .map(|i| self.render_conjunct(i))
            .collect();
        write!(f, "{} ({})", parts.join(" and "), self.behavior)
    }
}

/// Integral values print without a fractional part.
pub fn fmt_number(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub(crate) fn number_value(x: f64) -> serde_json::Value {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        serde_json::Value::from(x as i64)
    } else {
        serde_json::Value::from(x)
    }
}

/// Compile change propositions to a formula over the pair (x1, x2).
pub fn build_formula(props: &ChangePropositions, defaults: &Thresholds) -> ExpectedChangeFormula {
    use Lhs::*;
    use Op::*;

    let decrease = props.change == Change::Decrease;
    let (abs_lhs, rel_lhs) = if decrease { (Drop, RelDrop) } else { (Rise, RelRise) };
    let conjuncts = match (props.change, props.modifier, props.quantity) {
        (Change::Same, _, _) => {
            let delta = match props.behavior {
                Behavior::Speed => defaults.delta_speed,
                Behavior::Steering => defaults.delta_steering,
            };
            if props.negated {
                vec![Conjunct::new(AbsDiff, Gt, delta)]
            } else {
                vec![Conjunct::new(AbsDiff, Le, delta)]
            }
        }
        (_, Modifier::None, _) | (_, _, None) => {
            if props.negated {
                vec![Conjunct::new(abs_lhs, Le, 0.0)]
            } else {
                vec![Conjunct::new(abs_lhs, Gt, 0.0)]
            }
        }
        (_, modifier, Some(q)) => {
            let (lhs, n) = match q.unit {
                Unit::Absolute => (abs_lhs, q.value),
                Unit::Percent => (rel_lhs, q.value / 100.0),
            };
            match (modifier, props.negated) {
                (Modifier::LessThan, false) => {
                    vec![Conjunct::new(lhs, Le, n), Conjunct::new(abs_lhs, Gt, 0.0)]
                }
                (Modifier::LessThan, true) => vec![Conjunct::new(lhs, Ge, n)],
                (_, false) => vec![Conjunct::new(lhs, Ge, n)],
                (_, true) => vec![Conjunct::new(lhs, Le, n)],
            }
        }
    };
    ExpectedChangeFormula {
        behavior: props.behavior,
        conjuncts,
        pair: Pair::X1X2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn props(change: Change, modifier: Modifier, q: Option<(f64, Unit)>, negated: bool) -> ChangePropositions {
        ChangePropositions {
            change,
            modifier,
            quantity: q.map(|(value, unit)| Quantity { value, unit }),
            negated,
            comparative_more: false,
            behavior: Behavior::Speed,
        }
    }

    fn rendered(p: &ChangePropositions) -> Vec<String> {
        let f = build_formula(p, &Thresholds::default());
        (0..f.conjuncts.len()).map(|i| f.render_conjunct(i)).collect()
    }

    #[test]
    fn simple_rows() {
        use Change::*;
        assert_eq!(rendered(&props(Decrease, Modifier::None, None, false)), ["x1-x2 > 0"]);
        assert_eq!(rendered(&props(Increase, Modifier::None, None, false)), ["x2-x1 > 0"]);
        assert_eq!(rendered(&props(Decrease, Modifier::None, None, true)), ["x1-x2 <= 0"]);
        assert_eq!(rendered(&props(Increase, Modifier::None, None, true)), ["x2-x1 <= 0"]);
    }

    #[test]
    fn quantity_rows() {
        use Change::*;
        let pct = Some((30.0, Unit::Percent));
        let abs = Some((10.0, Unit::Absolute));
        assert_eq!(rendered(&props(Decrease, Modifier::AtLeast, pct, false)), ["(x1-x2)/x1 >= 0.3"]);
        assert_eq!(rendered(&props(Decrease, Modifier::LessThan, abs, false)), ["x1-x2 <= 10", "x1-x2 > 0"]);
        assert_eq!(rendered(&props(Decrease, Modifier::LessThan, abs, true)), ["x1-x2 >= 10"]);
        assert_eq!(rendered(&props(Increase, Modifier::LessThan, pct, false)), ["(x2-x1)/x1 <= 0.3", "x2-x1 > 0"]);
    }

    #[test]
    fn same_uses_behavior_delta() {
        let mut p = ChangePropositions::simple(Change::Same, Behavior::Steering);
        assert_eq!(rendered(&p), ["|x1-x2| <= 1.39"]);
        p.behavior = Behavior::Speed;
        assert_eq!(rendered(&p), ["|x1-x2| <= 0"]);
    }

    #[test]
    fn relative_zero_denominator_is_degenerate() {
        let f = build_formula(
            &props(Change::Decrease, Modifier::AtLeast, Some((30.0, Unit::Percent)), false),
            &Thresholds::default(),
        );
        assert_eq!(f.evaluate(0.0, 0.0), Evaluation::Degenerate(0));
        assert_eq!(f.evaluate(50.0, 40.0), Evaluation::Fails(0));
        assert_eq!(f.evaluate(50.0, 30.0), Evaluation::Holds);
    }

    #[test]
    fn numbers_print_minimally() {
        assert_eq!(fmt_number(0.0), "0");
        assert_eq!(fmt_number(0.3), "0.3");
        assert_eq!(fmt_number(1.39), "1.39");
        assert_eq!(number_value(0.0).to_string(), "0");
        assert_eq!(number_value(0.3).to_string(), "0.3");
    }
}
