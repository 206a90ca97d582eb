//! Text serialization and graph rendering.
//!
//! One arc per line, `src<TAB>dst<TAB>isym<TAB>osym<TAB>weight`; final
//! states as `state<TAB>weight`. State 0 is the start state; `<eps>`
//! stands for epsilon. Symbol tables use `token<TAB>id` lines.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, StateId};
use crate::symbols::SymbolTable;
use crate::weight::Weight;

/// State permutation putting the start state at 0.
fn numbering(f: &Fst) -> Vec<StateId> {
    let mut map: Vec<StateId> = f.states().collect();
    if let Some(s) = f.start() {
        map.swap(0, s);
    }
    map
}

pub fn write_text(f: &Fst, table: &SymbolTable) -> String {
    let mut out = String::new();
    if f.start().is_none() {
        return out;
    }
    // map[new] = old; since it is a swap, it is its own inverse
    let map = numbering(f);
    let sym = |l| table.symbol(l).unwrap_or("?");
    for (new, &old) in map.iter().enumerate() {
        for a in f.arcs(old) {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                new,
                map[a.nextstate],
                sym(a.ilabel),
                sym(a.olabel),
                a.weight
            );
        }
        let w = f.final_weight(old);
        if !w.is_zero() {
            let _ = writeln!(out, "{new}\t{w}");
        }
    }
    out
}

/// Parses the text format; symbols missing from `table` are inserted.
pub fn read_text(text: &str, table: &mut SymbolTable) -> Result<Fst> {
    let mut f = Fst::for_table(table);
    let ensure = |f: &mut Fst, s: StateId| {
        while f.num_states() <= s {
            f.add_state();
        }
    };
    let parse_state = |s: &str, line: usize| -> Result<StateId> {
        s.parse().map_err(|_| Error::Format {
            line,
            msg: format!("bad state id `{s}`"),
        })
    };
    let parse_weight = |s: &str, line: usize| -> Result<Weight> {
        s.parse().map_err(|_| Error::Format {
            line,
            msg: format!("bad weight `{s}`"),
        })
    };
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.len() {
            1 | 2 => {
                let s = parse_state(fields[0].trim(), n)?;
                let w = match fields.get(1) {
                    Some(w) => parse_weight(w, n)?,
                    None => Weight::one(),
                };
                ensure(&mut f, s);
                f.set_final(s, w);
            }
            4 | 5 => {
                let src = parse_state(fields[0], n)?;
                let dst = parse_state(fields[1], n)?;
                let il = table.insert(fields[2]);
                let ol = table.insert(fields[3]);
                let w = match fields.get(4) {
                    Some(w) => parse_weight(w, n)?,
                    None => Weight::one(),
                };
                ensure(&mut f, src.max(dst));
                f.add_arc(src, Arc::new(il, ol, w, dst));
            }
            _ => {
                return Err(Error::Format {
                    line: n,
                    msg: format!("expected 1, 2, 4 or 5 fields, found {}", fields.len()),
                })
            }
        }
    }
    if f.num_states() > 0 {
        f.set_start(0);
    }
    Ok(f)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz description of the machine.
pub fn draw(f: &Fst, table: &SymbolTable) -> String {
    let mut out = String::from("digraph fst {\n  rankdir = LR;\n");
    let map = numbering(f);
    let sym = |l| dot_escape(table.symbol(l).unwrap_or("?"));
    for (new, &old) in map.iter().enumerate() {
        let w = f.final_weight(old);
        let (shape, label) = if w.is_zero() {
            ("circle", format!("{new}"))
        } else {
            ("doublecircle", format!("{new}/{w}"))
        };
        let style = if Some(old) == f.start() {
            ", style = bold"
        } else {
            ""
        };
        let _ = writeln!(out, "  {new} [label = \"{label}\", shape = {shape}{style}];");
    }
    for new in 0..f.num_states() {
        for a in f.arcs(map[new]) {
            let _ = writeln!(
                out,
                "  {} -> {} [label = \"{}:{}/{}\"];",
                new,
                map[a.nextstate],
                sym(a.ilabel),
                sym(a.olabel),
                a.weight
            );
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::compile_string;

    #[test]
    fn format_is_exact() {
        let mut t = SymbolTable::new();
        let mut f = compile_string(&["a", "{##}"], &mut t);
        f.arcs_mut(0)[0].weight = Weight::new(0.5);
        assert_eq!(
            write_text(&f, &t),
            "0\t1\ta\ta\t0.5\n1\t2\t{##}\t{##}\t0.0\n2\t0.0\n"
        );
    }

    #[test]
    fn start_is_renumbered_to_zero() {
        let mut f = Fst::new();
        f.add_states(2);
        f.set_start(1);
        f.set_final(0, Weight::new(1.0));
        f.add_arc(1, Arc::new(0, 0, Weight::one(), 0));
        let t = SymbolTable::new();
        assert_eq!(write_text(&f, &t), "0\t1\t<eps>\t<eps>\t0.0\n1\t1.0\n");
    }

    #[test]
    fn omitted_weights_default_to_one() {
        let mut t = SymbolTable::new();
        let f = read_text("0\t1\ta\tb\n1\n", &mut t).unwrap();
        assert_eq!(f.arcs(0)[0].weight, Weight::one());
        assert_eq!(f.final_weight(1), Weight::one());
    }

    #[test]
    fn empty_machine_is_empty_text() {
        let t = SymbolTable::new();
        assert_eq!(write_text(&Fst::new(), &t), "");
        let mut t = SymbolTable::new();
        assert_eq!(read_text("", &mut t).unwrap().start(), None);
    }

    #[test]
    fn bad_lines() {
        let mut t = SymbolTable::new();
        assert!(read_text("0\t1\ta\n", &mut t).is_err());
        assert!(read_text("x\t1.0\n", &mut t).is_err());
    }
}
