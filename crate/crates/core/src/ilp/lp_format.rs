//! CPLEX LP text format, restricted to what binary models need.

use std::fmt::Write as _;

use super::{IlpError, IlpModel, Relation, VarId};

const WRAP: usize = 200;

fn coef_text(a: f64) -> String {
    if a.fract() == 0.0 && a.abs() < 1e15 {
        format!("{}", a as i64)
    } else {
        format!("{a}")
    }
}

fn write_expr(out: &mut String, m: &IlpModel, terms: &[(VarId, f64)], head: &str) {
    let mut line = String::from(head);
    if terms.is_empty() {
        line.push_str(" 0");
    }
    for (k, &(v, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { "-" } else { "+" };
        let mag = a.abs();
        let mut piece = String::new();
        if k > 0 || a < 0.0 {
            piece.push(' ');
            piece.push_str(sign);
        }
        piece.push(' ');
        if mag != 1.0 {
            piece.push_str(&coef_text(mag));
            piece.push(' ');
        }
        piece.push_str(m.var_name(v));
        if line.len() + piece.len() > WRAP {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push_str(&piece);
    }
    out.push_str(&line);
}

pub fn export_lp(m: &IlpModel) -> String {
    let mut out = String::from("\\ 0-1 model\nMaximize\n");
    write_expr(&mut out, m, m.objective(), " obj:");
    out.push_str("\nSubject To\n");
    for (i, c) in m.constraints().iter().enumerate() {
        let head = if c.name.is_empty() { format!(" c{}:", i + 1) } else { format!(" {}:", c.name) };
        write_expr(&mut out, m, &c.terms, &head);
        writeln!(out, " {} {}", c.relation.symbol(), coef_text(c.rhs)).unwrap();
    }
    out.push_str("Bounds\n");
    for j in 0..m.num_vars() {
        writeln!(out, " 0 <= {} <= 1", m.var_name(VarId(j))).unwrap();
    }
    out.push_str("Binary\n");
    for j in 0..m.num_vars() {
        writeln!(out, " {}", m.var_name(VarId(j))).unwrap();
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Num(f64),
    Sign(f64),
    Colon,
    Rel(Relation),
}

fn lex(line: &str, line_no: usize, out: &mut Vec<(Tok, usize)>) -> Result<(), IlpError> {
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == '\\' {
            break;
        } else if c == '+' || c == '-' {
            out.push((Tok::Sign(if c == '+' { 1.0 } else { -1.0 }), line_no));
            i += 1;
        } else if c == ':' {
            out.push((Tok::Colon, line_no));
            i += 1;
        } else if "<>=".contains(c) {
            let mut j = i;
            while j < bytes.len() && "<>=".contains(bytes[j] as char) {
                j += 1;
            }
            let rel = match &line[i..j] {
                "<=" | "=<" | "<" => Relation::Le,
                ">=" | "=>" | ">" => Relation::Ge,
                "=" => Relation::Eq,
                other => return Err(IlpError::Parse { line: line_no, msg: format!("bad relation `{other}`") }),
            };
            out.push((Tok::Rel(rel), line_no));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < bytes.len() {
                let d = bytes[j] as char;
                let exp_sign = (d == '+' || d == '-') && j > i && matches!(bytes[j - 1] as char, 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    j += 1;
                } else {
                    break;
                }
            }
            let v = line[i..j]
                .parse()
                .map_err(|_| IlpError::Parse { line: line_no, msg: format!("bad number `{}`", &line[i..j]) })?;
            out.push((Tok::Num(v), line_no));
            i = j;
        } else {
            let mut j = i;
            while j < bytes.len() && !(bytes[j] as char).is_ascii_whitespace() && !"+-:<>=\\".contains(bytes[j] as char) {
                j += 1;
            }
            out.push((Tok::Name(line[i..j].to_string()), line_no));
            i = j;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binary,
    End,
}

fn section_of(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "maximize" | "maximum" | "max" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Constraints),
        "bounds" | "bound" => Some(Section::Bounds),
        "binary" | "binaries" | "bin" => Some(Section::Binary),
        "end" => Some(Section::End),
        _ => None,
    }
}

#[derive(Default)]
struct RawModel {
    vars: Vec<String>,
    objective: Vec<(String, f64)>,
    rows: Vec<(String, Vec<(String, f64)>, Relation, f64)>,
}

impl RawModel {
    fn touch(&mut self, name: &str) {
        if !self.vars.iter().any(|v| v == name) {
            self.vars.push(name.to_string());
        }
    }
}

/// Parses `[label:] {[sign] [coef] name}` up to a relation or the end.
fn parse_terms(toks: &[(Tok, usize)], pos: &mut usize) -> Result<Vec<(String, f64)>, IlpError> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    while let Some((tok, line)) = toks.get(*pos) {
        match tok {
            Tok::Sign(s) => sign *= s,
            Tok::Num(v) => {
                if coef.is_some() {
                    return Err(IlpError::Parse { line: *line, msg: "two coefficients in a row".into() });
                }
                coef = Some(*v);
            }
            Tok::Name(n) => {
                terms.push((n.clone(), sign * coef.unwrap_or(1.0)));
                sign = 1.0;
                coef = None;
            }
            Tok::Rel(_) => break,
            Tok::Colon => return Err(IlpError::Parse { line: *line, msg: "unexpected `:`".into() }),
        }
        *pos += 1;
    }
    if let Some(v) = coef {
        // A bare constant in an expression; only zero is meaningful here.
        if v != 0.0 {
            let line = toks.get(pos.saturating_sub(1)).map_or(0, |t| t.1);
            return Err(IlpError::Parse { line, msg: "constant terms are not supported".into() });
        }
    }
    Ok(terms)
}

fn take_label(toks: &[(Tok, usize)], pos: &mut usize) -> Option<String> {
    if let (Some((Tok::Name(n), _)), Some((Tok::Colon, _))) = (toks.get(*pos), toks.get(*pos + 1)) {
        *pos += 2;
        return Some(n.clone());
    }
    None
}

/// Parses LP text produced by [`export_lp`] or any writer using the same
/// subset: maximization, linear rows, `0 <= x <= 1` bounds, binary section.
pub fn parse_lp(text: &str) -> Result<IlpModel, IlpError> {
    let mut section = Section::None;
    let mut obj_toks = Vec::new();
    let mut row_toks = Vec::new();
    let mut raw = RawModel::default();
    let mut binaries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim_start().starts_with('\\') || line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section_of(line) {
            section = s;
            continue;
        }
        if line.trim().eq_ignore_ascii_case("minimize") || line.trim().eq_ignore_ascii_case("min") {
            return Err(IlpError::Parse { line: line_no, msg: "only maximization models are supported".into() });
        }
        match section {
            Section::None => return Err(IlpError::Parse { line: line_no, msg: "text before `Maximize`".into() }),
            Section::Objective => lex(line, line_no, &mut obj_toks)?,
            Section::Constraints => lex(line, line_no, &mut row_toks)?,
            Section::Bounds => {
                let mut toks = Vec::new();
                lex(line, line_no, &mut toks)?;
                let ok = matches!(
                    toks.as_slice(),
                    [(Tok::Num(lo), _), (Tok::Rel(Relation::Le), _), (Tok::Name(_), _), (Tok::Rel(Relation::Le), _), (Tok::Num(hi), _)]
                        if *lo == 0.0 && *hi == 1.0
                );
                if !ok {
                    return Err(IlpError::Parse { line: line_no, msg: "only `0 <= x <= 1` bounds are supported".into() });
                }
            }
            Section::Binary => {
                for name in line.split_whitespace() {
                    binaries.push(name.to_string());
                }
            }
            Section::End => return Err(IlpError::Parse { line: line_no, msg: "text after `End`".into() }),
        }
    }
    if section != Section::End {
        return Err(IlpError::Parse { line: text.lines().count(), msg: "missing `End`".into() });
    }

    let mut pos = 0;
    take_label(&obj_toks, &mut pos);
    raw.objective = parse_terms(&obj_toks, &mut pos)?;
    if let Some((_, line)) = obj_toks.get(pos) {
        return Err(IlpError::Parse { line: *line, msg: "relation in objective".into() });
    }

    let mut pos = 0;
    while pos < row_toks.len() {
        let label = take_label(&row_toks, &mut pos).unwrap_or_default();
        let terms = parse_terms(&row_toks, &mut pos)?;
        let line = row_toks.get(pos).map_or(0, |t| t.1);
        let Some((Tok::Rel(rel), _)) = row_toks.get(pos) else {
            return Err(IlpError::Parse { line, msg: "constraint without relation".into() });
        };
        pos += 1;
        let mut sign = 1.0;
        if let Some((Tok::Sign(s), _)) = row_toks.get(pos) {
            sign = *s;
            pos += 1;
        }
        let Some((Tok::Num(rhs), _)) = row_toks.get(pos) else {
            return Err(IlpError::Parse { line, msg: "constraint without numeric rhs".into() });
        };
        pos += 1;
        raw.rows.push((label, terms, *rel, sign * rhs));
    }

    for name in &binaries {
        raw.touch(name);
    }
    let names: Vec<String> = raw
        .objective
        .iter()
        .map(|t| t.0.clone())
        .chain(raw.rows.iter().flat_map(|r| r.1.iter().map(|t| t.0.clone())))
        .collect();
    for name in &names {
        if !binaries.contains(name) {
            return Err(IlpError::Parse { line: 0, msg: format!("variable `{name}` is not declared binary") });
        }
    }

    let mut m = IlpModel::new();
    for v in &raw.vars {
        m.add_binary(v.clone())?;
    }
    let resolve = |terms: &[(String, f64)], m: &IlpModel| -> Vec<(VarId, f64)> {
        terms.iter().map(|(n, a)| (m.var(n).expect("declared above"), *a)).collect()
    };
    let obj = resolve(&raw.objective, &m);
    m.set_objective(obj)?;
    for (label, terms, rel, rhs) in &raw.rows {
        let t = resolve(terms, &m);
        m.add_constraint(label.clone(), t, *rel, *rhs)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> IlpModel {
        let mut m = IlpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y_1_2").unwrap();
        m.set_objective(vec![(x, 1.0), (y, 2.5)]).unwrap();
        m.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0).unwrap();
        m.add_constraint("cov", vec![(x, -3.0), (y, 1.0)], Relation::Ge, -2.0).unwrap();
        m.add_constraint("", vec![(y, 1.0)], Relation::Eq, 0.0).unwrap();
        m
    }

    #[test]
    fn export_sections() {
        let text = export_lp(&sample());
        for s in ["Maximize\n", "Subject To\n", "Bounds\n", "Binary\n", "End\n"] {
            assert!(text.contains(s), "{text}");
        }
        assert!(text.contains(" obj: x + 2.5 y_1_2\n"));
        assert!(text.contains(" cov: - 3 x + y_1_2 >= -2\n"));
        assert!(text.contains(" c3: y_1_2 = 0\n"));
    }

    #[test]
    fn roundtrip() {
        let m = sample();
        let back = parse_lp(&export_lp(&m)).unwrap();
        assert_eq!(back.num_vars(), 2);
        assert_eq!(back.objective(), m.objective());
        assert_eq!(back.constraints().len(), 3);
        assert_eq!(back.constraints()[1], m.constraints()[1]);
        assert_eq!(back.constraints()[2].name, "c3");
        assert_eq!(export_lp(&back), export_lp(&m));
    }

    #[test]
    fn long_rows_wrap_and_reparse() {
        let mut m = IlpModel::new();
        let vars: Vec<_> = (0..200).map(|i| m.add_binary(format!("y_{i}_1")).unwrap()).collect();
        m.add_constraint("cap_1", vars.iter().map(|&v| (v, 1.0)).collect(), Relation::Le, 64.0).unwrap();
        let text = export_lp(&m);
        assert!(text.lines().all(|l| l.len() <= WRAP + 20));
        let back = parse_lp(&text).unwrap();
        assert_eq!(back.constraints()[0].terms.len(), 200);
        assert_eq!(back.constraints()[0].rhs, 64.0);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_lp("Maximize\n obj: x\nSubject To\n c: x <= 1\nBinary\n x\n").is_err());
        assert!(parse_lp("Minimize\n obj: x\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n obj: x\nSubject To\n c: x 1\nBinary\n x\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n obj: x\nBinary\nEnd\n").is_err());
        let ok = parse_lp("\\ hi\nMaximize\n obj: 2 x\nSubject To\n x <= 1\nBinary\n x\nEnd\n").unwrap();
        assert_eq!(ok.constraints()[0].name, "");
    }
}
