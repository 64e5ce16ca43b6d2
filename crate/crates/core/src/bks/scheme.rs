//! Text format for measurement schemes.
//!
//! One measurement per line:
//!
//! ```text
//! pivot | plus_edge [{o1,o2}] ; minus_edge [{o3,o4}]   # comment
//! ```
//!
//! Two short forms are accepted where they are unambiguous: `Ex-Ex` (the pure
//! edge basis, pivot = first member of the edge) and `Ex-Ey+` / `Ex-Ey-`,
//! where the suffix is the pivot eigenvalue that selects `Ex`. A bare `Ex-Ey`
//! is rejected because it does not say which edge takes the `+1` branch.

use crate::error::{Error, Result};
use crate::pentagram::{intersection, EdgeId, ObservableName, Pentagram};

use super::measurement::HybridMeasurement;

/// The scheme shipped with the crate: eleven measurements, one parity proof.
pub const FIG2_SCHEME: &str = include_str!("../../data/fig2.scheme");

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn parse_edge(token: &str) -> Result<EdgeId> {
    token.parse::<EdgeId>()
}

/// `E3` or `E3 {x1,z2}`.
fn parse_branch(text: &str) -> Result<(EdgeId, Option<[ObservableName; 2]>)> {
    let text = text.trim();
    let Some(brace) = text.find('{') else {
        return Ok((parse_edge(text)?, None));
    };
    let edge = parse_edge(text[..brace].trim())?;
    let inner = text[brace + 1..]
        .strip_suffix('}')
        .ok_or_else(|| err(brace, "unterminated '{'"))?;
    let names = inner
        .split(',')
        .map(|s| s.trim().parse::<ObservableName>())
        .collect::<Result<Vec<_>>>()?;
    let pair: [ObservableName; 2] = names
        .try_into()
        .map_err(|v: Vec<_>| err(brace, format!("expected 2 observables, got {}", v.len())))?;
    Ok((edge, Some(pair)))
}

fn parse_short_form(p: &Pentagram, text: &str) -> Result<HybridMeasurement> {
    let (body, suffix) = match text.strip_suffix('+') {
        Some(b) => (b, Some(true)),
        None => match text.strip_suffix('-') {
            Some(b) => (b, Some(false)),
            None => (text, None),
        },
    };
    let (a, b) = body.split_once('-').ok_or_else(|| {
        err(
            0,
            format!("expected `pivot | edge ; edge` or `Ex-Ey`, got {text:?}"),
        )
    })?;
    let (a, b) = (parse_edge(a.trim())?, parse_edge(b.trim())?);
    if a == b {
        let pivot = p.edge(a).members[0];
        return HybridMeasurement::new(p, pivot, a, None, a, None);
    }
    let first_is_plus = suffix.ok_or_else(|| {
        err(
            0,
            format!("{a}-{b} is ambiguous: append + or - to say which pivot sign selects {a}"),
        )
    })?;
    let (plus, minus) = if first_is_plus { (a, b) } else { (b, a) };
    let pivot = intersection(p, a, b)?;
    HybridMeasurement::new(p, pivot, plus, None, minus, None)
}

/// Parses one measurement (no comment handling).
pub fn parse_measurement(p: &Pentagram, text: &str) -> Result<HybridMeasurement> {
    let text = text.trim();
    let Some((pivot, rest)) = text.split_once('|') else {
        return parse_short_form(p, text);
    };
    let pivot = pivot.trim().parse::<ObservableName>()?;
    let (plus, minus) = rest
        .split_once(';')
        .ok_or_else(|| err(text.len(), "missing ';' between the two branches"))?;
    let (plus_edge, plus_pair) = parse_branch(plus)?;
    let (minus_edge, minus_pair) = parse_branch(minus)?;
    HybridMeasurement::new(p, pivot, plus_edge, plus_pair, minus_edge, minus_pair)
}

/// Parses a whole scheme file. Errors carry the 1-based line number.
pub fn parse_scheme(p: &Pentagram, text: &str) -> Result<Vec<HybridMeasurement>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let m = parse_measurement(p, line).map_err(|e| Error::Scheme {
            line: idx + 1,
            message: match e {
                Error::Parse { message, .. } | Error::Usage(message) => message,
                other => other.to_string(),
            },
        })?;
        out.push(m);
    }
    if out.is_empty() {
        return Err(Error::Scheme {
            line: 0,
            message: "scheme contains no measurements".into(),
        });
    }
    Ok(out)
}

/// Renders a scheme in canonical file form.
pub fn format_scheme(scheme: &[HybridMeasurement]) -> String {
    scheme
        .iter()
        .map(|m| format!("{}    # {}\n", m.scheme_line(), m.edge_symbol()))
        .collect()
}

pub fn fig2_scheme(p: &Pentagram) -> Vec<HybridMeasurement> {
    parse_scheme(p, FIG2_SCHEME).expect("the bundled scheme parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pentagram::build_pentagram;
    use ObservableName::*;

    #[test]
    fn bundled_scheme_has_eleven_rows() {
        let p = build_pentagram();
        let scheme = fig2_scheme(&p);
        assert_eq!(scheme.len(), 11);
        let symbols: Vec<String> = scheme.iter().map(|m| m.edge_symbol()).collect();
        assert_eq!(
            symbols,
            [
                "E1-E5", "E1-E4", "E1-E3", "E1-E2", "E2-E5", "E2-E4", "E2-E3", "E3-E5", "E3-E4",
                "E4-E5", "E5-E5"
            ]
        );
        assert_eq!(scheme[0].to_string(), "(A|{B,C}{z1,z2})");
        assert_eq!(scheme[10].to_string(), "(A|{B,C}{B,C})");
    }

    #[test]
    fn formatted_scheme_reparses() {
        let p = build_pentagram();
        let scheme = fig2_scheme(&p);
        assert_eq!(parse_scheme(&p, &format_scheme(&scheme)).unwrap(), scheme);
    }

    #[test]
    fn short_forms() {
        let p = build_pentagram();
        let m = parse_measurement(&p, "E2-E5+").unwrap();
        assert_eq!(
            (m.pivot(), m.plus_edge(), m.minus_edge()),
            (B, EdgeId::E2, EdgeId::E5)
        );
        let m = parse_measurement(&p, "E1-E5-").unwrap();
        assert_eq!(
            (m.pivot(), m.plus_edge(), m.minus_edge()),
            (A, EdgeId::E5, EdgeId::E1)
        );
        let m = parse_measurement(&p, "E5-E5").unwrap();
        assert!(m.is_degenerate());
        assert!(matches!(
            parse_measurement(&p, "E1-E5"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn default_pairs_and_explicit_pairs() {
        let p = build_pentagram();
        let m = parse_measurement(&p, "A | E5 ; E1").unwrap();
        assert_eq!(m.plus_pair(), [B, C]);
        assert_eq!(m.minus_pair(), [Z1, Z3]);
        let m = parse_measurement(&p, " A|E5{B , D};E1{z2,z3} ").unwrap();
        assert_eq!(m.plus_pair(), [B, D]);
    }

    #[test]
    fn errors_report_line_numbers() {
        let p = build_pentagram();
        let text = "# header\nA | E5 ; E1\n\nA | E9 ; E1\n";
        match parse_scheme(&p, text) {
            Err(Error::Scheme { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected scheme error, got {other:?}"),
        }
        assert!(matches!(
            parse_scheme(&p, "x1 | E1 ; E5"),
            Err(Error::Scheme { line: 1, .. })
        ));
        assert!(matches!(
            parse_scheme(&p, "A | E5 {B,C ; E1"),
            Err(Error::Scheme { line: 1, .. })
        ));
        assert!(matches!(
            parse_scheme(&p, "# nothing\n"),
            Err(Error::Scheme { .. })
        ));
    }
}
