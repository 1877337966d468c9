use crate::kernel::{Atom, Axiom, SourceSpan};
use crate::semiring::Value;

use super::parser::{parse_term_list, parse_value_text};
use super::ParseError;

/// Read a fact table: one `pred <TAB> arg,arg,... <TAB> value` line per
/// axiom. The value column may be omitted, in which case `default` (the
/// semiring's identity, normally) is used. `#` starts a comment line.
pub fn parse_facts_tsv(text: &str, default: &Value) -> Result<Vec<Axiom>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() > 3 {
            return Err(ParseError {
                line: lineno,
                col: 1,
                message: format!("expected at most 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let reposition = |mut e: ParseError, what: &str| {
            e.message = format!("{what}: {}", e.message);
            e.line = lineno;
            e.col = 1;
            e
        };
        let pred_field = fields[0].trim();
        let pred = parse_term_list(pred_field)
            .ok()
            .and_then(|ts| match ts.as_slice() {
                [crate::kernel::Term::Sym(s)] => Some(s.clone()),
                _ => None,
            })
            .ok_or_else(|| ParseError {
                line: lineno,
                col: 1,
                message: format!("bad predicate name {pred_field:?}"),
            })?;
        let args = match fields.get(1) {
            Some(f) => {
                parse_term_list(f.trim()).map_err(|e| reposition(e, "bad argument list"))?
            }
            None => Vec::new(),
        };
        if let Some(bad) = args.iter().find(|t| !t.is_ground()) {
            return Err(ParseError {
                line: lineno,
                col: 1,
                message: format!("fact argument {bad} is not ground"),
            });
        }
        let value = match fields.get(2) {
            Some(f) => parse_value_text(f.trim()).map_err(|e| reposition(e, "bad value"))?,
            None => default.clone(),
        };
        let mut ax = Axiom::new(Atom::new(pred, args), value);
        ax.span = Some(SourceSpan {
            line: lineno,
            col: 1,
        });
        out.push(ax);
    }
    Ok(out)
}
