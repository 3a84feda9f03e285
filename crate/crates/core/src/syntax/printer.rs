use std::fmt::Write;

use crate::logic::{FiniteStructure, Formula, Quantifier, Term, Vocabulary};

const IFF: u8 = 1;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

/// Prints a formula with minimal parentheses; the output re-parses to the same tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, IFF, true);
    out
}

fn term(t: &Term) -> &str {
    t.name()
}

// `tail`: nothing follows this subformula up to the enclosing parenthesis, so a
// quantifier may extend to the right without brackets.
fn write_formula(out: &mut String, f: &Formula, min_prec: u8, tail: bool) {
    match f {
        Formula::Atom(rel, args) => {
            out.push_str(rel);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(term(a));
            }
            out.push(')');
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "{} = {}", term(a), term(b));
        }
        Formula::Not(g) => {
            if let Formula::Eq(a, b) = g.as_ref() {
                let _ = write!(out, "{} != {}", term(a), term(b));
            } else {
                out.push('~');
                write_formula(out, g, UNARY, tail);
            }
        }
        Formula::Forall(..) | Formula::Exists(..) => {
            let (q, first, mut body) = split_quantifier(f).unwrap();
            let mut vars = vec![first];
            while let Some((q2, v, inner)) = split_quantifier(body) {
                if q2 != q {
                    break;
                }
                vars.push(v);
                body = inner;
            }
            if !tail {
                out.push('(');
            }
            let _ = write!(out, "{} {}. ", q.keyword(), vars.join(", "));
            write_formula(out, body, IFF, true);
            if !tail {
                out.push(')');
            }
        }
        Formula::And(a, b) => binary(out, a, b, " & ", AND, false, min_prec, tail),
        Formula::Or(a, b) => binary(out, a, b, " | ", OR, false, min_prec, tail),
        Formula::Implies(a, b) => binary(out, a, b, " -> ", IMP, true, min_prec, tail),
        Formula::Iff(a, b) => binary(out, a, b, " <-> ", IFF, false, min_prec, tail),
    }
}

#[allow(clippy::too_many_arguments)]
fn binary(
    out: &mut String,
    lhs: &Formula,
    rhs: &Formula,
    op: &str,
    prec: u8,
    right_assoc: bool,
    min_prec: u8,
    tail: bool,
) {
    let paren = prec < min_prec;
    let inner_tail = paren || tail;
    if paren {
        out.push('(');
    }
    let (lp, rp) = if right_assoc { (prec + 1, prec) } else { (prec, prec + 1) };
    write_formula(out, lhs, lp, false);
    out.push_str(op);
    write_formula(out, rhs, rp, inner_tail);
    if paren {
        out.push(')');
    }
}

fn split_quantifier(f: &Formula) -> Option<(Quantifier, &str, &Formula)> {
    match f {
        Formula::Forall(v, g) => Some((Quantifier::Forall, v, g)),
        Formula::Exists(v, g) => Some((Quantifier::Exists, v, g)),
        _ => None,
    }
}

/// One structure in the structure-file syntax.
pub fn print_structure(s: &FiniteStructure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "structure {} : {} {{", s.name(), s.vocab().name());
    let _ = writeln!(out, "  universe = {{ {} }};", s.universe().join(", "));
    for (r, sym) in s.vocab().relations().iter().enumerate() {
        let tuples: Vec<String> = s
            .tuples(r)
            .into_iter()
            .map(|t| {
                let names: Vec<&str> = t.into_iter().map(|i| s.element(i)).collect();
                format!("({})", names.join(","))
            })
            .collect();
        if tuples.is_empty() {
            let _ = writeln!(out, "  {} = {{ }};", sym.name);
        } else {
            let _ = writeln!(out, "  {} = {{ {} }};", sym.name, tuples.join(", "));
        }
    }
    for (c, &e) in s.vocab().constants().iter().zip(s.constant_elements()) {
        let _ = writeln!(out, "  {} = {};", c, s.element(e));
    }
    out.push_str("}\n");
    out
}

/// A complete structure file: the vocabulary declaration then every structure.
pub fn print_structure_file(vocab: &Vocabulary, structures: &[FiniteStructure]) -> String {
    let mut out = format!("{vocab}\n");
    for s in structures {
        out.push_str(&print_structure(s));
    }
    out
}
