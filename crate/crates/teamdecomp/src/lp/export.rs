use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::Zero;
use serde_json::json;

use super::{RowSense, SparseLP, VarBound};
use crate::rational::{q_to_f64, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    LpText,
    Mps,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lp-text" | "lp" => Ok(ExportFormat::LpText),
            "mps" => Ok(ExportFormat::Mps),
            other => Err(format!("unknown export format `{other}` (expected lp-text or mps)")),
        }
    }
}

/// An exported model. Fixed MPS limits names to 8 characters, so `names`
/// then holds a JSON map from the mangled names back to the originals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Export {
    pub text: String,
    pub names: Option<String>,
}

pub fn export_lp(lp: &SparseLP, format: ExportFormat) -> Export {
    match format {
        ExportFormat::LpText => Export { text: lp_text(lp), names: None },
        ExportFormat::Mps => mps(lp),
    }
}

fn num(v: &Q) -> String {
    let f = q_to_f64(v);
    if f == f.trunc() && f.abs() < 1e15 {
        format!("{}", f as i64)
    } else {
        format!("{f:?}")
    }
}

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: &[(String, &Q)]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, (name, v)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let neg = **v < Q::zero();
        let mag = num(&if neg { -(*v).clone() } else { (*v).clone() });
        match (k, neg) {
            (0, false) => write!(out, " {mag} {name}"),
            (0, true) => write!(out, " -{mag} {name}"),
            (_, false) => write!(out, " + {mag} {name}"),
            (_, true) => write!(out, " - {mag} {name}"),
        }
        .expect("writing to a String");
    }
}

fn lp_text(lp: &SparseLP) -> String {
    let mut out = String::from("\\ team saddle-point LP\nMaximize\n obj:");
    let obj: Vec<(String, &Q)> = lp
        .objective
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (lp.col_names[j].clone(), v))
        .collect();
    if obj.is_empty() && lp.cols() > 0 {
        let _ = write!(out, " 0 {}", lp.col_names[0]);
    } else {
        push_terms(&mut out, &obj);
    }
    out.push_str("\nSubject To\n");
    let mut start = 0;
    for r in 0..lp.rows() {
        let mut end = start;
        while end < lp.triplets.len() && lp.triplets[end].0 == r {
            end += 1;
        }
        let terms: Vec<(String, &Q)> = lp.triplets[start..end].iter().map(|(_, c, v)| (lp.col_names[*c].clone(), v)).collect();
        let _ = write!(out, " {}:", lp.row_names[r]);
        push_terms(&mut out, &terms);
        let sense = match lp.senses[r] {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        };
        let _ = writeln!(out, " {sense} {}", num(&lp.rhs[r]));
        start = end;
    }
    out.push_str("Bounds\n");
    for (j, b) in lp.bounds.iter().enumerate() {
        if *b == VarBound::Free {
            let _ = writeln!(out, " {} free", lp.col_names[j]);
        }
    }
    out.push_str("End\n");
    out
}

/// Base-36 name of fixed width 7 behind a one-letter prefix.
fn mangle(prefix: char, i: usize) -> String {
    const DIGITS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    let mut s = [b'0'; 7];
    let mut n = i;
    for k in (0..7).rev() {
        s[k] = DIGITS[n % 36];
        n /= 36;
    }
    format!("{prefix}{}", std::str::from_utf8(&s).expect("ascii"))
}

/// Formats a number in at most 12 characters.
fn mps_num(v: &Q) -> String {
    let f = q_to_f64(v);
    let plain = num(v);
    if plain.len() <= 12 {
        return plain;
    }
    for prec in (0..=10).rev() {
        let s = format!("{f:.prec$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{f:.0e}")
}

fn mps(lp: &SparseLP) -> Export {
    let rows: Vec<String> = (0..lp.rows()).map(|i| mangle('R', i)).collect();
    let cols: Vec<String> = (0..lp.cols()).map(|j| mangle('C', j)).collect();
    let mut out = String::from("NAME          TEAMLP\nOBJSENSE\n    MAX\nROWS\n N  OBJ\n");
    for (r, name) in rows.iter().enumerate() {
        let t = match lp.senses[r] {
            RowSense::Le => "L",
            RowSense::Eq => "E",
            RowSense::Ge => "G",
        };
        let _ = writeln!(out, " {t}  {name}");
    }
    out.push_str("COLUMNS\n");
    let columns = lp.columns();
    for (j, col) in columns.iter().enumerate() {
        let mut entries: Vec<(&str, String)> = Vec::new();
        if !lp.objective[j].is_zero() || col.is_empty() {
            entries.push(("OBJ", mps_num(&lp.objective[j])));
        }
        entries.extend(col.iter().map(|(r, v)| (rows[*r].as_str(), mps_num(v))));
        for pair in entries.chunks(2) {
            let _ = write!(out, "    {:<8}  {:<8}  {:>12}", cols[j], pair[0].0, pair[0].1);
            if let Some((name, v)) = pair.get(1) {
                let _ = write!(out, "   {name:<8}  {v:>12}");
            }
            out.push('\n');
        }
    }
    out.push_str("RHS\n");
    for (r, v) in lp.rhs.iter().enumerate() {
        if !v.is_zero() {
            let _ = writeln!(out, "    {:<8}  {:<8}  {:>12}", "RHS", rows[r], mps_num(v));
        }
    }
    out.push_str("BOUNDS\n");
    for (j, b) in lp.bounds.iter().enumerate() {
        if *b == VarBound::Free {
            let _ = writeln!(out, " FR {:<8}  {}", "BND", cols[j]);
        }
    }
    out.push_str("ENDATA\n");

    let map = json!({
        "rows": rows.iter().zip(&lp.row_names).map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "columns": cols.iter().zip(&lp.col_names).map(|(k, v)| (k.clone(), json!(v))).collect::<serde_json::Map<_, _>>(),
    });
    Export { text: out, names: Some(serde_json::to_string_pretty(&map).expect("map serializes") + "\n") }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn toy() -> SparseLP {
        SparseLP {
            col_names: vec!["x".into(), "y".into()],
            row_names: vec!["c0".into()],
            objective: vec![qi(1), qi(2)],
            bounds: vec![VarBound::NonNegative, VarBound::NonNegative],
            senses: vec![RowSense::Le],
            rhs: vec![qi(1)],
            triplets: vec![(0, 0, qi(1)), (0, 1, qi(1))],
        }
    }

    #[test]
    fn toy_lp_text() {
        let text = export_lp(&toy(), ExportFormat::LpText).text;
        assert_eq!(
            text,
            "\\ team saddle-point LP\nMaximize\n obj: 1 x + 2 y\nSubject To\n c0: 1 x + 1 y <= 1\nBounds\nEnd\n"
        );
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn mangled_names_fit() {
        assert_eq!(mangle('R', 0), "R0000000");
        assert_eq!(mangle('C', 36), "C0000010");
        assert!(mps_num(&crate::rational::q(-1, 24)).len() <= 12);
    }
}
