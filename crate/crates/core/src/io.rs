//! JSON file formats.
//!
//! Every format is a JSON object. Utilities and values are strings such as
//! `"-1"`, `"0.25"`, `"5/9"` or `"inf"` so that rationals survive exactly.
//! Saving is canonical: keys sorted, quintuples in canonical order, one
//! quintuple per line.
//!
//! ```text
//! pentaform   {"quintuples": [[i, j, w, a, y], ...]}
//! game        pentaform fields + "stakeholders": [k, ...],
//!             "utilities": {y: {k: x}}
//! strategy    {"choices": {j: a}}
//! values      {"values": {t: {k: x}}}
//! system      {"stakeholders": [...], "initial": c,
//!              "model": {"discount": "1/10"}
//!                     | {"absolute_terminal": [{"cycle": [c, ...], "utility": {k: x}}]},
//!              "classes": {c: {"quintuples": [...],
//!                              "exits": {y: {"terminal": {k: x}}
//!                                         | {"continue": c', "reward": {k: x}}}}}}
//! stationary strategy  {"classes": {c: {j: a}}}
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::form::{validate, Label, Pentaform, Quintuple, QuintupleSet};
use crate::game::{Game, Profile, ValueFunction, XReal};
use crate::stationary::{
    CycleUtility, Exit, PieceClass, StationaryStrategy, StationarySystem, UtilityModel,
};
use crate::strategy::{Choices, Strategy};

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

/// Reads a file into a JSON value. An empty file reads as `{}`.
pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_err(path.display().to_string(), e.to_string()))?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json(text: &str, origin: &str) -> Result<Value> {
    if text.trim().is_empty() {
        return Ok(Value::Object(Map::new()));
    }
    serde_json::from_str(text).map_err(|e| {
        parse_err(
            format!("{origin}:{}:{}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| parse_err(at, "expected an object"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| parse_err(at, format!("missing field {key:?}")))
}

fn string(v: &Value, at: &str) -> Result<Label> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| parse_err(at, "expected a string"))
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| parse_err(at, "expected an array"))
}

fn strings(v: &Value, at: &str) -> Result<Vec<Label>> {
    array(v, at)?
        .iter()
        .enumerate()
        .map(|(n, x)| string(x, &format!("{at}[{n}]")))
        .collect()
}

fn xreal(v: &Value, at: &str) -> Result<XReal> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(parse_err(at, "expected a number or a numeric string")),
    };
    s.parse::<XReal>().map_err(|_| {
        parse_err(
            at,
            format!("{s:?} is not an integer, decimal, fraction or ±inf"),
        )
    })
}

fn rational(v: &Value, at: &str) -> Result<BigRational> {
    match xreal(v, at)? {
        XReal::Finite(r) => Ok(r),
        _ => Err(parse_err(at, "expected a finite number")),
    }
}

fn profile(v: &Value, at: &str) -> Result<Profile> {
    let m = object(v, at)?;
    let mut out = BTreeMap::new();
    for (k, x) in m {
        out.insert(k.clone(), xreal(x, &format!("{at}.{k}"))?);
    }
    Ok(Profile::new(out))
}

fn label_map(v: &Value, at: &str) -> Result<BTreeMap<Label, Label>> {
    let m = object(v, at)?;
    m.iter()
        .map(|(k, x)| Ok((k.clone(), string(x, &format!("{at}.{k}"))?)))
        .collect()
}

fn quintuple_rows(v: &Value, at: &str) -> Result<QuintupleSet> {
    let mut q = QuintupleSet::new();
    for (n, row) in array(v, at)?.iter().enumerate() {
        let here = format!("{at}[{n}]");
        let xs = strings(row, &here)?;
        let [i, j, w, a, y]: [Label; 5] = xs
            .try_into()
            .map_err(|_| parse_err(&here, "a quintuple has exactly five labels"))?;
        q.insert(Quintuple::new(i, j, w, a, y));
    }
    Ok(q)
}

/// The raw quintuple set of a pentaform or game file, without validation.
pub fn quintuples_from_json(v: &Value) -> Result<QuintupleSet> {
    let m = object(v, "file")?;
    match m.get("quintuples") {
        Some(q) => quintuple_rows(q, "quintuples"),
        None if m.is_empty() => Ok(QuintupleSet::new()),
        None => Err(parse_err("file", "missing field \"quintuples\"")),
    }
}

pub fn pentaform_from_json(v: &Value) -> Result<Pentaform> {
    validate(quintuples_from_json(v)?).map_err(Error::NotAPentaform)
}

pub fn game_from_json(v: &Value) -> Result<Game> {
    let p = pentaform_from_json(v)?;
    let m = object(v, "file")?;
    let stakeholders: BTreeSet<Label> = strings(field(m, "stakeholders", "file")?, "stakeholders")?
        .into_iter()
        .collect();
    let u = object(field(m, "utilities", "file")?, "utilities")?;
    let mut utilities = BTreeMap::new();
    for (y, prof) in u {
        utilities.insert(y.clone(), profile(prof, &format!("utilities.{y}"))?);
    }
    Game::new(p, stakeholders, utilities)
}

pub fn strategy_from_json(v: &Value, p: &Pentaform) -> Result<Strategy> {
    let m = object(v, "file")?;
    Strategy::new(p, label_map(field(m, "choices", "file")?, "choices")?)
}

pub fn values_from_json(v: &Value, g: &Game) -> Result<ValueFunction> {
    let m = object(v, "file")?;
    let vals = object(field(m, "values", "file")?, "values")?;
    let mut out = BTreeMap::new();
    for (t, prof) in vals {
        out.insert(t.clone(), profile(prof, &format!("values.{t}"))?);
    }
    ValueFunction::new(g, out)
}

pub fn system_from_json(v: &Value) -> Result<StationarySystem> {
    let m = object(v, "file")?;
    let stakeholders: BTreeSet<Label> = strings(field(m, "stakeholders", "file")?, "stakeholders")?
        .into_iter()
        .collect();
    let initial = string(field(m, "initial", "file")?, "initial")?;
    let model_v = object(field(m, "model", "file")?, "model")?;
    let model = match (model_v.get("discount"), model_v.get("absolute_terminal")) {
        (Some(b), None) => UtilityModel::Discounted(rational(b, "model.discount")?),
        (None, Some(cycles)) => {
            let mut out = Vec::new();
            for (n, c) in array(cycles, "model.absolute_terminal")?.iter().enumerate() {
                let at = format!("model.absolute_terminal[{n}]");
                let cm = object(c, &at)?;
                out.push(CycleUtility {
                    cycle: strings(field(cm, "cycle", &at)?, &format!("{at}.cycle"))?,
                    utility: profile(field(cm, "utility", &at)?, &format!("{at}.utility"))?,
                });
            }
            UtilityModel::AbsoluteTerminal(out)
        }
        _ => {
            return Err(parse_err(
                "model",
                "give exactly one of \"discount\" and \"absolute_terminal\"",
            ))
        }
    };
    let mut classes = BTreeMap::new();
    for (c, cv) in object(field(m, "classes", "file")?, "classes")? {
        let at = format!("classes.{c}");
        let cm = object(cv, &at)?;
        let q = quintuple_rows(field(cm, "quintuples", &at)?, &format!("{at}.quintuples"))?;
        let template = validate(q).map_err(Error::NotAPentaform)?;
        let mut exits = BTreeMap::new();
        for (y, ev) in object(field(cm, "exits", &at)?, &format!("{at}.exits"))? {
            let here = format!("{at}.exits.{y}");
            let em = object(ev, &here)?;
            let exit = match (em.get("terminal"), em.get("continue")) {
                (Some(r), None) => Exit::Terminal(profile(r, &format!("{here}.terminal"))?),
                (None, Some(next)) => Exit::Continue {
                    class: string(next, &format!("{here}.continue"))?,
                    reward: profile(field(em, "reward", &here)?, &format!("{here}.reward"))?,
                },
                _ => {
                    return Err(parse_err(
                        &here,
                        "give exactly one of \"terminal\" and \"continue\"",
                    ))
                }
            };
            exits.insert(y.clone(), exit);
        }
        classes.insert(c.clone(), PieceClass { template, exits });
    }
    StationarySystem::new(stakeholders, classes, initial, model)
}

pub fn stationary_strategy_from_json(
    v: &Value,
    sys: &StationarySystem,
) -> Result<StationaryStrategy> {
    let m = object(v, "file")?;
    let mut choices = BTreeMap::new();
    for (c, cv) in object(field(m, "classes", "file")?, "classes")? {
        choices.insert(c.clone(), label_map(cv, &format!("classes.{c}"))?);
    }
    StationaryStrategy::new(sys, choices)
}

// Writing. The output is built by hand so that short arrays stay on one line.

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn indent(n: usize) -> String {
    "  ".repeat(n)
}

fn write_object(out: &mut String, entries: &[(String, String)], depth: usize) {
    if entries.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for (n, (k, v)) in entries.iter().enumerate() {
        let comma = if n + 1 < entries.len() { "," } else { "" };
        let _ = writeln!(out, "{}{}: {}{}", indent(depth + 1), quote(k), v, comma);
    }
    out.push_str(&indent(depth));
    out.push('}');
}

fn object_text(entries: Vec<(String, String)>, depth: usize) -> String {
    let mut s = String::new();
    write_object(&mut s, &entries, depth);
    s
}

fn profile_text(p: &Profile) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|(k, x)| format!("{}: {}", quote(k), quote(&x.to_string())))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn labels_text(xs: impl IntoIterator<Item = impl AsRef<str>>) -> String {
    let parts: Vec<String> = xs.into_iter().map(|x| quote(x.as_ref())).collect();
    format!("[{}]", parts.join(", "))
}

fn quintuples_text(q: &QuintupleSet, depth: usize) -> String {
    let rows = q.canonical_order();
    if rows.is_empty() {
        return "[]".into();
    }
    let mut s = String::from("[\n");
    for (n, x) in rows.iter().enumerate() {
        let comma = if n + 1 < rows.len() { "," } else { "" };
        let row = labels_text([
            &x.player,
            &x.situation,
            &x.decision_node,
            &x.action,
            &x.successor,
        ]);
        let _ = writeln!(s, "{}{}{}", indent(depth + 1), row, comma);
    }
    s.push_str(&indent(depth));
    s.push(']');
    s
}

fn choices_text(c: &Choices, depth: usize) -> String {
    object_text(
        c.iter().map(|(j, a)| (j.clone(), quote(a))).collect(),
        depth,
    )
}

fn profiles_text(m: &BTreeMap<Label, Profile>, depth: usize) -> String {
    object_text(
        m.iter()
            .map(|(k, p)| (k.clone(), profile_text(p)))
            .collect(),
        depth,
    )
}

pub fn pentaform_to_string(p: &Pentaform) -> String {
    object_text(
        vec![("quintuples".into(), quintuples_text(p.quintuples(), 1))],
        0,
    ) + "\n"
}

pub fn game_to_string(g: &Game) -> String {
    object_text(
        vec![
            (
                "quintuples".into(),
                quintuples_text(g.form().quintuples(), 1),
            ),
            ("stakeholders".into(), labels_text(g.stakeholders())),
            ("utilities".into(), profiles_text(g.utilities(), 1)),
        ],
        0,
    ) + "\n"
}

pub fn strategy_to_string(s: &Strategy) -> String {
    object_text(vec![("choices".into(), choices_text(s.choices(), 1))], 0) + "\n"
}

pub fn values_to_string(v: &ValueFunction) -> String {
    object_text(vec![("values".into(), profiles_text(v.values(), 1))], 0) + "\n"
}

pub fn system_to_string(sys: &StationarySystem) -> String {
    let model = match sys.model() {
        UtilityModel::Discounted(b) => format!("{{\"discount\": {}}}", quote(&b.to_string())),
        UtilityModel::AbsoluteTerminal(cycles) => {
            let rows: Vec<String> = cycles
                .iter()
                .map(|c| {
                    format!(
                        "{}{{\"cycle\": {}, \"utility\": {}}}",
                        indent(2),
                        labels_text(&c.cycle),
                        profile_text(&c.utility)
                    )
                })
                .collect();
            if rows.is_empty() {
                "{\"absolute_terminal\": []}".into()
            } else {
                format!(
                    "{{\"absolute_terminal\": [\n{}\n{}]}}",
                    rows.join(",\n"),
                    indent(1)
                )
            }
        }
    };
    let classes = sys
        .classes()
        .iter()
        .map(|(c, class)| {
            let exits = class
                .exits
                .iter()
                .map(|(y, e)| {
                    let text = match e {
                        Exit::Terminal(r) => format!("{{\"terminal\": {}}}", profile_text(r)),
                        Exit::Continue { class, reward } => format!(
                            "{{\"continue\": {}, \"reward\": {}}}",
                            quote(class),
                            profile_text(reward)
                        ),
                    };
                    (y.clone(), text)
                })
                .collect();
            let body = object_text(
                vec![
                    (
                        "quintuples".into(),
                        quintuples_text(class.template.quintuples(), 3),
                    ),
                    ("exits".into(), object_text(exits, 3)),
                ],
                2,
            );
            (c.clone(), body)
        })
        .collect();
    object_text(
        vec![
            ("stakeholders".into(), labels_text(sys.stakeholders())),
            ("initial".into(), quote(sys.initial())),
            ("model".into(), model),
            ("classes".into(), object_text(classes, 1)),
        ],
        0,
    ) + "\n"
}

pub fn stationary_strategy_to_string(s: &StationaryStrategy) -> String {
    let classes = s
        .choices()
        .iter()
        .map(|(c, ch)| (c.clone(), choices_text(ch, 2)))
        .collect();
    object_text(vec![("classes".into(), object_text(classes, 1))], 0) + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::authentic_value;

    fn reparse(text: &str) -> Value {
        parse_json(text, "test").unwrap()
    }

    #[test]
    fn pentaform_round_trip() {
        let p = fixtures::cry_wolf_form(1);
        let text = pentaform_to_string(&p);
        assert_eq!(pentaform_from_json(&reparse(&text)).unwrap(), p);
        assert!(text.contains("[\"Kid\", \"{1}\", \"1\", \"c\", \"3\"]"));
    }

    #[test]
    fn game_strategy_value_round_trip() {
        let g = fixtures::entry_deterrence_game();
        let g2 = game_from_json(&reparse(&game_to_string(&g))).unwrap();
        assert_eq!(g2, g);
        let s = Strategy::from_pairs(g.form(), [("jE", "~e"), ("jI", "f")]).unwrap();
        let s2 = strategy_from_json(&reparse(&strategy_to_string(&s)), g.form()).unwrap();
        assert_eq!(s2, s);
        let v = authentic_value(&g, &s).unwrap();
        assert_eq!(
            values_from_json(&reparse(&values_to_string(&v)), &g).unwrap(),
            v
        );
    }

    #[test]
    fn system_round_trip() {
        for sys in [
            fixtures::cry_wolf_system(),
            fixtures::ann_system(),
            fixtures::eda_system(),
        ] {
            let text = system_to_string(&sys);
            assert_eq!(system_from_json(&reparse(&text)).unwrap(), sys);
        }
        let sys = fixtures::cry_wolf_system();
        let s = fixtures::cry_wolf_quiet(&sys);
        let text = stationary_strategy_to_string(&s);
        assert_eq!(
            stationary_strategy_from_json(&reparse(&text), &sys).unwrap(),
            s
        );
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse_json("{\"quintuples\": [}", "f.json").unwrap_err();
        assert!(
            matches!(e, Error::Parse { ref location, .. } if location.starts_with("f.json:1:"))
        );
        let v = reparse(r#"{"quintuples": [["a", "b", "c", "d"]]}"#);
        let e = quintuples_from_json(&v).unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "quintuples[0]"));
        let v = reparse(
            r#"{"quintuples": [["P","j","0","a","1"]], "stakeholders": ["P"],
                "utilities": {"1": {"P": "lots"}}}"#,
        );
        let e = game_from_json(&v).unwrap_err();
        assert!(matches!(e, Error::Parse { ref location, .. } if location == "utilities.1.P"));
    }

    #[test]
    fn empty_file_is_the_empty_set() {
        assert!(quintuples_from_json(&reparse("  \n")).unwrap().is_empty());
    }
}
