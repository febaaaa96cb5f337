//! CPLEX-style LP text for [`MipModel`], and a reader for the same dialect.
//!
//! The writer lists every variable in `Bounds` in declaration order, so
//! reading an exported file gives back an equal model.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Formulation, LinExpr, MipModel, ModelDims, Sense, VarId, Variable};
use crate::instance::Instance;
use crate::solution::Solution;

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Error, PartialEq)]
#[error("LP line {line}: {reason}")]
pub struct LpParseError {
    pub line: usize,
    pub reason: String,
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn write_expr(out: &mut String, head: &str, expr: &LinExpr) {
    out.push_str(head);
    for (n, (var, coef)) in expr.terms.iter().enumerate() {
        if n > 0 && n % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0.0 { '-' } else { '+' };
        let mag = coef.abs();
        if mag == 1.0 {
            let _ = write!(out, " {sign} {var}");
        } else {
            let _ = write!(out, " {sign} {} {var}", num(mag));
        }
    }
    if expr.terms.is_empty() {
        out.push_str(" 0");
    }
}

fn is_binary(v: &Variable) -> bool {
    v.integer && v.lower == 0.0 && v.upper == 1.0
}

pub fn export_lp(model: &MipModel) -> String {
    let mut out = String::new();
    let d = model.dims;
    let _ = writeln!(
        out,
        "\\ lotforge {} periods={} warehouses={} retailers={}",
        model.formulation, d.periods, d.warehouses, d.retailers
    );
    out.push_str("Minimize\n");
    write_expr(&mut out, " obj:", &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        write_expr(&mut out, &format!(" {}:", c.name), &c.expr);
        let _ = writeln!(out, " {} {}", c.sense, num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let id = v.id;
        let _ = if v.lower == v.upper {
            writeln!(out, " {id} = {}", num(v.lower))
        } else if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            writeln!(out, " {id} free")
        } else if v.upper == f64::INFINITY {
            writeln!(out, " {id} >= {}", num(v.lower))
        } else {
            writeln!(out, " {} <= {id} <= {}", num(v.lower), num(v.upper))
        };
    }
    for (title, pick) in [("Binaries", true), ("Generals", false)] {
        let names: Vec<String> = model
            .variables
            .iter()
            .filter(|v| v.integer && is_binary(v) == pick)
            .map(|v| v.id.to_string())
            .collect();
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{title}");
        for chunk in names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// MIP-start text with one `<name> <value>` line per STD variable.
pub fn export_mip_start(instance: &Instance, sol: &Solution) -> String {
    let mut out = String::new();
    for i in 0..instance.num_facilities() {
        let facility = instance.facility_id(i);
        for t in 0..instance.num_periods() {
            let _ = writeln!(out, "{} {}", VarId::X { facility, period: t }, sol.x[i][t]);
            let _ = writeln!(out, "{} {}", VarId::S { facility, period: t }, sol.s[i][t]);
            let _ = writeln!(out, "{} {}", VarId::Y { facility, period: t }, u8::from(sol.y[i][t]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Cmp(Sense),
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Tok>, LpParseError> {
    let err = |reason: String| LpParseError { line: line_no, reason };
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            ':' => {
                toks.push(Tok::Colon);
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], '<' | '>' | '=') {
                    j += 1;
                }
                let op: String = chars[i..j].iter().collect();
                let sense = match op.as_str() {
                    "<=" | "=<" | "<" => Sense::Le,
                    ">=" | "=>" | ">" => Sense::Ge,
                    "=" => Sense::Eq,
                    _ => return Err(err(format!("unknown operator `{op}`"))),
                };
                toks.push(Tok::Cmp(sense));
                i = j;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && matches!(chars[j], 'e' | 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && matches!(chars[k], '+' | '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        j = k;
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                }
                let text: String = chars[i..j].iter().collect();
                let v = text.parse().map_err(|_| err(format!("bad number `{text}`")))?;
                toks.push(Tok::Num(v));
                i = j;
            }
            _ => {
                let mut j = i;
                while j < chars.len() && !chars[j].is_whitespace() && !"+-:<>=".contains(chars[j]) {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                match text.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => toks.push(Tok::Num(f64::INFINITY)),
                    _ => toks.push(Tok::Name(text)),
                }
                i = j;
            }
        }
    }
    Ok(toks)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Binaries,
    Generals,
    End,
}

fn section_header(line: &str) -> Option<(Section, &str)> {
    let lower = line.to_ascii_lowercase();
    let heads: [(&str, Section); 14] = [
        ("minimize", Section::Objective),
        ("minimum", Section::Objective),
        ("min", Section::Objective),
        ("subject to", Section::Rows),
        ("such that", Section::Rows),
        ("s.t.", Section::Rows),
        ("st", Section::Rows),
        ("bounds", Section::Bounds),
        ("binaries", Section::Binaries),
        ("binary", Section::Binaries),
        ("generals", Section::Generals),
        ("general", Section::Generals),
        ("end", Section::End),
        ("bound", Section::Bounds),
    ];
    for (word, section) in heads {
        if let Some(rest) = lower.strip_prefix(word) {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                return Some((section, line[word.len()..].trim()));
            }
        }
    }
    None
}

struct Builder {
    model: MipModel,
    bounded: Vec<VarId>,
}

impl Builder {
    fn var(&mut self, id: VarId) {
        if self.model.variable(&id).is_none() {
            self.model.add_var(id, 0.0, f64::INFINITY, false).expect("checked above");
        }
    }
}

fn var_id(name: &str, line: usize) -> Result<VarId, LpParseError> {
    name.parse().map_err(|reason| LpParseError { line, reason })
}

/// Parses a linear expression; stops at a comparison operator and returns its position.
fn parse_terms(toks: &[(Tok, usize)], mut i: usize, expr: &mut LinExpr) -> Result<usize, LpParseError> {
    while i < toks.len() {
        let line = toks[i].1;
        let mut sign = 1.0;
        let mut coef = None;
        loop {
            match toks.get(i).map(|t| &t.0) {
                Some(Tok::Plus) => i += 1,
                Some(Tok::Minus) => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        if let Some((Tok::Num(v), _)) = toks.get(i) {
            coef = Some(*v);
            i += 1;
        }
        match toks.get(i) {
            Some((Tok::Name(n), l)) => {
                expr.terms.push((var_id(n, *l)?, sign * coef.unwrap_or(1.0)));
                i += 1;
            }
            Some((Tok::Cmp(_), _)) | None => {
                if coef.is_some_and(|c| c != 0.0) {
                    return Err(LpParseError { line, reason: "constant terms are not supported".into() });
                }
                return Ok(i);
            }
            Some((t, l)) => {
                return Err(LpParseError { line: *l, reason: format!("unexpected {t:?} in expression") });
            }
        }
    }
    Ok(i)
}

fn parse_objective(b: &mut Builder, toks: &[(Tok, usize)]) -> Result<(), LpParseError> {
    let mut i = 0;
    if let [(Tok::Name(_), _), (Tok::Colon, _), ..] = toks {
        i = 2;
    }
    let mut expr = LinExpr::new();
    let end = parse_terms(toks, i, &mut expr)?;
    if let Some((_, line)) = toks.get(end) {
        return Err(LpParseError { line: *line, reason: "comparison in objective".into() });
    }
    for &(v, _) in &expr.terms {
        b.var(v);
    }
    b.model.objective = expr;
    Ok(())
}

fn parse_rows(b: &mut Builder, toks: &[(Tok, usize)]) -> Result<(), LpParseError> {
    let mut i = 0;
    while i < toks.len() {
        let line = toks[i].1;
        let name = match (&toks[i].0, toks.get(i + 1).map(|t| &t.0)) {
            (Tok::Name(n), Some(Tok::Colon)) => {
                i += 2;
                n.clone()
            }
            _ => format!("c{}", b.model.constraints.len() + 1),
        };
        let mut expr = LinExpr::new();
        i = parse_terms(toks, i, &mut expr)?;
        let sense = match toks.get(i) {
            Some((Tok::Cmp(s), _)) => *s,
            _ => return Err(LpParseError { line, reason: format!("row `{name}` has no comparison") }),
        };
        i += 1;
        let mut sign = 1.0;
        if let Some((Tok::Minus, _)) = toks.get(i) {
            sign = -1.0;
            i += 1;
        } else if let Some((Tok::Plus, _)) = toks.get(i) {
            i += 1;
        }
        let rhs = match toks.get(i) {
            Some((Tok::Num(v), _)) => sign * v,
            _ => return Err(LpParseError { line, reason: format!("row `{name}` has no right-hand side") }),
        };
        i += 1;
        for &(v, _) in &expr.terms {
            b.var(v);
        }
        b.model.add_constraint(name, expr, sense, rhs);
    }
    Ok(())
}

fn signed_num(toks: &[Tok], i: &mut usize) -> Option<f64> {
    let mut sign = 1.0;
    match toks.get(*i) {
        Some(Tok::Minus) => {
            sign = -1.0;
            *i += 1;
        }
        Some(Tok::Plus) => *i += 1,
        _ => {}
    }
    match toks.get(*i) {
        Some(Tok::Num(v)) => {
            *i += 1;
            Some(sign * v)
        }
        _ => None,
    }
}

fn parse_bound(b: &mut Builder, toks: &[Tok], line: usize) -> Result<(), LpParseError> {
    let err = || LpParseError { line, reason: "malformed bound".into() };
    let mut i = 0;
    let lead = signed_num(toks, &mut i);
    let lead_cmp = match (lead, toks.get(i)) {
        (Some(_), Some(Tok::Cmp(s))) => {
            i += 1;
            Some(*s)
        }
        (Some(_), _) => return Err(err()),
        (None, _) => None,
    };
    let id = match toks.get(i) {
        Some(Tok::Name(n)) => var_id(n, line)?,
        _ => return Err(err()),
    };
    i += 1;
    b.var(id);
    if !b.bounded.contains(&id) {
        b.bounded.push(id);
    }
    let v = b.model.variable_mut(&id).expect("declared above");
    if let (Some(a), Some(s)) = (lead, lead_cmp) {
        match s {
            Sense::Le => v.lower = a,
            Sense::Ge => v.upper = a,
            Sense::Eq => {
                v.lower = a;
                v.upper = a;
            }
        }
    }
    match toks.get(i) {
        None => Ok(()),
        Some(Tok::Name(n)) if n.eq_ignore_ascii_case("free") && lead.is_none() => {
            v.lower = f64::NEG_INFINITY;
            v.upper = f64::INFINITY;
            Ok(())
        }
        Some(Tok::Cmp(s)) => {
            let s = *s;
            i += 1;
            let a = signed_num(toks, &mut i).ok_or_else(err)?;
            if i != toks.len() {
                return Err(err());
            }
            match s {
                Sense::Le => v.upper = a,
                Sense::Ge => v.lower = a,
                Sense::Eq => {
                    v.lower = a;
                    v.upper = a;
                }
            }
            Ok(())
        }
        _ => Err(err()),
    }
}

fn header_dims(line: &str) -> Option<(Formulation, ModelDims)> {
    let rest = line.strip_prefix('\\')?.trim().strip_prefix("lotforge")?;
    let mut words = rest.split_whitespace();
    let formulation = words.next()?.parse().ok()?;
    let mut dims = ModelDims { periods: 0, warehouses: 0, retailers: 0 };
    for w in words {
        let (k, v) = w.split_once('=')?;
        let v = v.parse().ok()?;
        match k {
            "periods" => dims.periods = v,
            "warehouses" => dims.warehouses = v,
            "retailers" => dims.retailers = v,
            _ => return None,
        }
    }
    Some((formulation, dims))
}

// Files without a lotforge header: the formulation follows the variable
// families, the dimensions the largest indices seen.
fn infer_dims(model: &MipModel) -> (Formulation, ModelDims) {
    use crate::instance::FacilityKind;
    let mut f = Formulation::Std;
    let mut d = ModelDims { periods: 0, warehouses: 0, retailers: 0 };
    for v in &model.variables {
        let (period, retailer) = match v.id {
            VarId::X { facility, period } | VarId::S { facility, period } | VarId::Y { facility, period } => {
                match facility.kind {
                    FacilityKind::Warehouse => d.warehouses = d.warehouses.max(facility.index + 1),
                    FacilityKind::Retailer => d.retailers = d.retailers.max(facility.index + 1),
                    FacilityKind::Plant => {}
                }
                (period, None)
            }
            VarId::W { retailer, t, .. } | VarId::Sigma { retailer, t, .. } => {
                f = Formulation::Mc;
                (t, Some(retailer))
            }
            VarId::X3 { retailer, period, .. } | VarId::S3 { retailer, period, .. } => {
                f = Formulation::ThreeLevel;
                (period, Some(retailer))
            }
        };
        d.periods = d.periods.max(period + 1);
        if let Some(r) = retailer {
            d.retailers = d.retailers.max(r + 1);
        }
    }
    (f, d)
}

/// Reads LP text as written by [`export_lp`]. Only minimization is accepted.
pub fn parse_lp(text: &str) -> Result<MipModel, LpParseError> {
    let dims = ModelDims { periods: 0, warehouses: 0, retailers: 0 };
    let mut b = Builder { model: MipModel::new(Formulation::Std, dims), bounded: Vec::new() };
    let mut header = None;
    let mut section = Section::Preamble;
    let mut objective: Vec<(Tok, usize)> = Vec::new();
    let mut rows: Vec<(Tok, usize)> = Vec::new();
    let mut seen_objective = false;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        if header.is_none() && raw.trim_start().starts_with('\\') {
            header = header_dims(raw.trim());
        }
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let content = match section_header(line) {
            Some((s, rest)) => {
                if section == Section::End {
                    return Err(LpParseError { line: line_no, reason: "content after End".into() });
                }
                section = s;
                seen_objective |= s == Section::Objective;
                rest
            }
            None => line,
        };
        if content.is_empty() {
            continue;
        }
        if content.to_ascii_lowercase().starts_with("max") && section == Section::Preamble {
            return Err(LpParseError { line: line_no, reason: "only minimization models are supported".into() });
        }
        let toks = lex(content, line_no)?;
        match section {
            Section::Preamble => {
                return Err(LpParseError { line: line_no, reason: "expected Minimize".into() });
            }
            Section::End => return Err(LpParseError { line: line_no, reason: "content after End".into() }),
            Section::Objective => objective.extend(toks.into_iter().map(|t| (t, line_no))),
            Section::Rows => rows.extend(toks.into_iter().map(|t| (t, line_no))),
            Section::Bounds => {
                // rows are complete once bounds begin; resolve them first so
                // variable order follows the file
                if !objective.is_empty() || !rows.is_empty() {
                    parse_objective(&mut b, &std::mem::take(&mut objective))?;
                    parse_rows(&mut b, &std::mem::take(&mut rows))?;
                }
                parse_bound(&mut b, &toks, line_no)?;
            }
            Section::Binaries | Section::Generals => {
                for t in toks {
                    let Tok::Name(n) = t else {
                        return Err(LpParseError { line: line_no, reason: "expected variable names".into() });
                    };
                    let id = var_id(&n, line_no)?;
                    b.var(id);
                    let v = b.model.variable_mut(&id).expect("declared above");
                    v.integer = true;
                    if section == Section::Binaries {
                        v.lower = 0.0;
                        v.upper = 1.0;
                    }
                }
            }
        }
    }
    if !seen_objective {
        return Err(LpParseError { line: 0, reason: "missing Minimize section".into() });
    }
    if !objective.is_empty() || !rows.is_empty() {
        parse_objective(&mut b, &objective)?;
        parse_rows(&mut b, &rows)?;
    }
    if section != Section::End {
        return Err(LpParseError { line: 0, reason: "missing End".into() });
    }

    // declaration order: bounds first (the writer lists every variable),
    // then anything only seen in rows
    let mut model = b.model;
    let mut order: Vec<VarId> = b.bounded.clone();
    for v in &model.variables {
        if !b.bounded.contains(&v.id) {
            order.push(v.id);
        }
    }
    let (formulation, dims) = header.unwrap_or_else(|| infer_dims(&model));
    let mut out = MipModel::new(formulation, dims);
    for id in order {
        let v = model.variable_mut(&id).expect("declared").clone();
        out.add_var(v.id, v.lower, v.upper, v.integer).expect("unique");
    }
    out.objective = model.objective;
    out.constraints = model.constraints;
    Ok(out)
}
