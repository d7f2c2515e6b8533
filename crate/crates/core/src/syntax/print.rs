use std::fmt;

use super::{Atom, Formula, Sequent};

// Binding strength; quantifiers are printed in parentheses whenever they are
// an operand so that their maximal right scope cannot swallow a sibling.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Atom(_) | Formula::Not(_) => UNARY,
        Formula::Forall(..) | Formula::Exists(..) => 0,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens || precedence(child) == 0 {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pred { name, args } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Atom::Sim { base, left, right } => write!(f, "{left} ~{base} {right}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                write_operand(f, a, precedence(a) < UNARY)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let (op, prec, right_assoc) = match self {
                    Formula::And(..) => ("&", AND, false),
                    Formula::Or(..) => ("|", OR, false),
                    _ => ("->", IMP, true),
                };
                let (pa, pb) = (precedence(a), precedence(b));
                write_operand(f, a, pa < prec || (pa == prec && right_assoc))?;
                write!(f, " {op} ")?;
                write_operand(f, b, pb < prec || (pb == prec && !right_assoc))
            }
            Formula::Forall(v, body) => write!(f, "forall {v}. {body}"),
            Formula::Exists(v, body) => write!(f, "exists {v}. {body}"),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |side: &std::collections::BTreeSet<Formula>| {
            side.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match (self.left.is_empty(), self.right.is_empty()) {
            (true, true) => f.write_str("|-"),
            (true, false) => write!(f, "|- {}", join(&self.right)),
            (false, true) => write!(f, "{} |-", join(&self.left)),
            (false, false) => write!(f, "{} |- {}", join(&self.left), join(&self.right)),
        }
    }
}
