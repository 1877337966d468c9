//! Chart output: one JSON object per line, sorted by atom text so runs
//! diff cleanly.

use crate::semiring::Value;
use crate::solver::Chart;

/// Shortest decimal form after rounding to 12 significant digits, so
/// accumulated float noise ("0.16000000000000003") prints as "0.16".
/// Infinities become quoted tokens since JSON numbers have none.
pub fn render_number(x: f64) -> String {
    if x.is_nan() {
        return "\"nan\"".into(); // unreachable from solving; carriers exclude it
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x }; // drop the sign of -0.0
    let rounded: f64 = format!("{x:.11e}").parse().unwrap();
    format!("{rounded}")
}

pub fn render_value_json(value: &Value) -> String {
    match value {
        Value::Bool(b) => b.to_string(),
        Value::Real(r) => render_number(*r),
        Value::Triple(x, y, z) => format!(
            "[{},{},{}]",
            render_number(*x),
            render_number(*y),
            render_number(*z)
        ),
    }
}

pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn render_chart(chart: &Chart) -> String {
    let mut lines: Vec<(String, &Value)> = chart
        .entries
        .iter()
        .map(|(atom, value)| (atom.text(), value))
        .collect();
    lines.sort_by(|(a, _), (b, _)| a.cmp(b));
    let mut out = String::new();
    for (text, value) in lines {
        out.push_str(&format!(
            "{{\"atom\":\"{}\",\"value\":{}}}\n",
            json_escape(&text),
            render_value_json(value)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::VITERBI;
    use crate::solver::{solve, SolveOptions};
    use crate::textio::parse_program;

    #[test]
    fn float_noise_rounds_away() {
        assert_eq!(render_number(0.16000000000000003), "0.16");
        assert_eq!(render_number(10.0), "10");
        assert_eq!(render_number(0.375), "0.375");
        assert_eq!(render_number(-0.0), "0");
        assert_eq!(render_number(f64::INFINITY), "\"inf\"");
        assert_eq!(render_number(f64::NEG_INFINITY), "\"-inf\"");
        // a genuine 13th digit is dropped, not preserved
        assert_eq!(render_number(1.234567890123456), "1.23456789012");
    }

    #[test]
    fn values_render_per_carrier() {
        assert_eq!(render_value_json(&Value::Bool(true)), "true");
        assert_eq!(render_value_json(&Value::Real(0.5)), "0.5");
        assert_eq!(
            render_value_json(&Value::Triple(0.5, f64::NEG_INFINITY, -0.0)),
            "[0.5,\"-inf\",0]"
        );
    }

    #[test]
    fn chart_lines_are_sorted_by_atom_text() {
        let text = "reachable(Q) += initial(Q).\n\
                    reachable(Q) += reachable(P) * edge(P, Q).\n\
                    initial(a) = 1.\n\
                    edge(a, d) = 0.2.\n\
                    edge(d, b) = 0.8.\n";
        let p = parse_program(text).unwrap();
        let chart = solve(&p, &VITERBI, &SolveOptions::default()).unwrap();
        let rendered = render_chart(&chart);
        let expect = "\
{\"atom\":\"edge(a, d)\",\"value\":0.2}
{\"atom\":\"edge(d, b)\",\"value\":0.8}
{\"atom\":\"initial(a)\",\"value\":1}
{\"atom\":\"reachable(a)\",\"value\":1}
{\"atom\":\"reachable(b)\",\"value\":0.16}
{\"atom\":\"reachable(d)\",\"value\":0.2}
";
        assert_eq!(rendered, expect);
    }

    #[test]
    fn quoted_symbols_escape_cleanly() {
        let text = "p(\"a b\") = 0.5.\n";
        let p = parse_program(text).unwrap();
        let chart = solve(&p, &VITERBI, &SolveOptions::default()).unwrap();
        assert_eq!(
            render_chart(&chart),
            "{\"atom\":\"p(\\\"a b\\\")\",\"value\":0.5}\n"
        );
    }
}
