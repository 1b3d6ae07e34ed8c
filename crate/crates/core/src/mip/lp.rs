//! Writer for the text LP interchange format.

use std::fmt::Write as _;

use super::model::{MipModel, Sense};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, model: &MipModel, terms: &[(usize, i64)]) {
    if terms.is_empty() {
        // An empty row still needs a variable to be well formed.
        out.push_str(" 0");
        if model.num_vars() > 0 {
            out.push(' ');
            out.push_str(&model.var_name(0));
        }
        return;
    }
    for (k, (v, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *c < 0 { '-' } else { '+' };
        if k == 0 && *c >= 0 {
            out.push(' ');
        } else {
            let _ = write!(out, " {sign} ");
        }
        if c.abs() != 1 {
            let _ = write!(out, "{} ", c.abs());
        }
        out.push_str(&model.var_name(*v));
    }
}

/// Renders the model; rows are named `<family>_<index>`.
pub fn write_lp(model: &MipModel) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ horizon {} actions {} block edges {}",
        model.horizon,
        model.actions.len(),
        model.blocks.len()
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints.iter().enumerate() {
        let _ = write!(out, " {}_{i}:", c.family.tag());
        write_terms(&mut out, model, &c.terms);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Binary\n");
    for v in 0..model.num_vars() {
        let _ = writeln!(out, " {}", model.var_name(v));
    }
    out.push_str("End\n");
    out
}
