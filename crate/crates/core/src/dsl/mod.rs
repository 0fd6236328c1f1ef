//! The `.op` operator description format and the builtin operator catalogue.
//!
//! ```text
//! # two-dimensional divergence
//! operator div2 {
//!   vars = 2;
//!   from = 2;
//!   order = 1;
//!   symbol = [[d1, d2]];
//! }
//! ```

mod builtins;
mod lexer;
mod parser;

pub use builtins::{builtin, builtin_descriptors, sym_dim, sym_index, BuiltinDescriptor, BuiltinParams};
pub use parser::{parse_operator, parse_operators, parse_polynomial, OperatorSource};

use crate::operator::OperatorSymbol;

/// Identifier-safe version of an operator name.
fn ident(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, '_');
    }
    s
}

/// Renders an operator in the `.op` format; `parse_operator` reads it back to
/// an identical symbol.
pub fn to_dsl(op: &OperatorSymbol) -> String {
    let mut out = String::new();
    out.push_str(&format!("operator {} {{\n", ident(op.name())));
    out.push_str(&format!("  vars = {};\n", op.n()));
    out.push_str(&format!("  from = {};\n", op.dim_from()));
    out.push_str(&format!("  order = {};\n", op.order()));
    out.push_str("  symbol = [\n");
    let s = op.symbol();
    for i in 0..s.rows() {
        let row: Vec<String> = (0..s.cols()).map(|j| s.get(i, j).render("d")).collect();
        let sep = if i + 1 == s.rows() { "" } else { "," };
        out.push_str(&format!("    [{}]{sep}\n", row.join(", ")));
    }
    out.push_str("  ];\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializer_round_trips_builtins() {
        for d in builtin_descriptors() {
            for n in [2, 3] {
                let Ok((a, b)) = builtin(d.name, &BuiltinParams::n(n)) else { continue };
                for op in std::iter::once(a).chain(b.map(|p| p.symbol)) {
                    let text = to_dsl(&op);
                    let back = parse_operator(&OperatorSource::new(text.clone(), "rt.op")).unwrap();
                    assert_eq!(back, op, "{text}");
                }
            }
        }
    }

    #[test]
    fn names_are_sanitized() {
        assert_eq!(ident("a-b c"), "a_b_c");
        assert_eq!(ident("3x"), "_3x");
    }
}
