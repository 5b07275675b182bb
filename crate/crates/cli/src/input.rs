//! Text forms of trees, sequences and level growths accepted on the command
//! line.

use std::fs;

use firefighter::scalar::parse_rational;
use firefighter::sequence::{Rule, SequenceFile, SequenceKind};
use firefighter::separation::LevelGrowth;
use firefighter::tree::{gen_standard, ChildRule, DegreeSequence, Family, LevelTree, RootedTree, TreeFile};
use firefighter::{Rational, Sequence};

/// Reads `@path` as a file, anything else as given.
fn inline_or_file(spec: &str) -> Result<String, String> {
    match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(spec.to_string()),
    }
}

fn rationals(list: &str) -> Result<Vec<Rational>, String> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_rational(s).map_err(|e| e.to_string()))
        .collect()
}

/// Sequence forms:
///
/// * `1,1/2,0` explicit values, zeros afterwards; `3/2,1...` repeats the
///   last value (materialized up to `pad` terms)
/// * `counts:1,0,1` explicit values for the integral game
/// * `const:C`, `linear:C`, `geom:C,R`, `periodic:1,0`
/// * `int:<spec>` marks any of the above as integral
/// * a JSON sequence file, inline or as `@path`
pub fn parse_sequence(spec: &str, pad: usize) -> Result<Sequence, String> {
    let text = inline_or_file(spec)?;
    let text = text.trim();
    if text.starts_with('{') {
        let file: SequenceFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        return Sequence::from_file(&file).map_err(|e| e.to_string());
    }
    if let Some(rest) = text.strip_prefix("int:") {
        return parse_sequence(rest, pad)?.into_integral().map_err(|e| e.to_string());
    }
    let (head, args) = text.split_once(':').unwrap_or(("", text));
    let kind = match head {
        "counts" => {
            let v = rationals(args)?;
            return Sequence::new(SequenceKind::Explicit(v), true).map_err(|e| e.to_string());
        }
        "const" | "constant" => match rationals(args)?.as_slice() {
            [c] => SequenceKind::Rule(Rule::Constant(c.clone())),
            _ => return Err(format!("const takes one value: {text:?}")),
        },
        "linear" => match rationals(args)?.as_slice() {
            [c] => SequenceKind::Rule(Rule::Linear(c.clone())),
            _ => return Err(format!("linear takes one value: {text:?}")),
        },
        "geom" | "geometric" => match rationals(args)?.as_slice() {
            [c, r] => SequenceKind::Rule(Rule::Geometric(c.clone(), r.clone())),
            _ => return Err(format!("geom takes two values: {text:?}")),
        },
        "periodic" => SequenceKind::Periodic(rationals(args)?),
        "" => match args.strip_suffix("...") {
            Some(list) => {
                let mut v = rationals(list)?;
                let last = v.last().cloned().ok_or_else(|| format!("nothing to repeat in {text:?}"))?;
                while v.len() < pad {
                    v.push(last.clone());
                }
                SequenceKind::Explicit(v)
            }
            None => SequenceKind::Explicit(rationals(args)?),
        },
        other => return Err(format!("unknown sequence form {other:?}")),
    };
    Sequence::new(kind, false).map_err(|e| e.to_string())
}

/// A finite tree from `--tree FILE` or `--family SPEC`.
pub fn load_tree(tree: Option<&str>, family: Option<&str>) -> Result<RootedTree, String> {
    match (tree, family) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let file: TreeFile = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
            RootedTree::from_file(&file).map_err(|e| e.to_string())
        }
        (None, Some(spec)) => {
            let family = Family::parse(&inline_or_file(spec)?)?;
            gen_standard(&family).map_err(|e| e.to_string())
        }
        (Some(_), Some(_)) => Err("give either --tree or --family, not both".into()),
        (None, None) => Err("an instance is required: --tree FILE or --family SPEC".into()),
    }
}

/// Infinite families for probing: `sst:2` (every vertex has 2 children),
/// `sst:3,2` (degrees per level, the last repeating), `spider`, `width:W`.
pub fn parse_level_tree(spec: &str) -> Result<LevelTree, String> {
    let (name, args) = spec.trim().split_once(':').unwrap_or((spec.trim(), ""));
    let nums = || -> Result<Vec<u64>, String> {
        args.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<u64>().map_err(|_| format!("bad number {s:?}")))
            .collect()
    };
    match name {
        "sst" => {
            let a = nums()?;
            let degrees = match a.as_slice() {
                [] => return Err("sst needs at least one degree".into()),
                [d] => DegreeSequence::Constant(*d),
                _ => DegreeSequence::Explicit(a),
            };
            Ok(LevelTree::spherically_symmetric(degrees))
        }
        "spider" => Ok(LevelTree::new(ChildRule::Spider)),
        "width" => match nums()?.as_slice() {
            [w] => Ok(LevelTree::new(ChildRule::ConstantWidth(*w))),
            _ => Err("width takes one number".into()),
        },
        other => Err(format!("unknown infinite family {other:?}")),
    }
}

/// `pow:B` for `t_i = B^i`, `poly:C,D` for `t_i = C·i^D`.
pub fn parse_growth(spec: &str) -> Result<LevelGrowth, String> {
    let (name, args) = spec.trim().split_once(':').unwrap_or((spec.trim(), ""));
    let nums: Vec<u64> = args
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u64>().map_err(|_| format!("bad number {s:?}")))
        .collect::<Result<_, _>>()?;
    match (name, nums.as_slice()) {
        ("pow", [b]) => Ok(LevelGrowth::Power { base: *b }),
        ("poly", [c, d]) => Ok(LevelGrowth::Polynomial { coeff: *c, degree: *d as u32 }),
        _ => Err(format!("expected pow:B or poly:C,D, got {spec:?}")),
    }
}
