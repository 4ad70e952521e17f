//! Human-readable output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use dioq::decide::{label_image, Certificate, Verdict, WitnessCertificate};
use dioq::descriptor::{desc_of_reduced, expand_within, expanded_size};
use dioq::term::subterm_occurrences;
use dioq::{bnum, Budget, VarId, VarTable};
use num_bigint::BigUint;

/// Reduced forms longer than this are shown as descriptors.
const SHOW_TERM_NODES: u32 = 60;

pub fn assignment(a: &BTreeMap<VarId, BigUint>, names: &VarTable) -> String {
    if a.is_empty() {
        return "(no variables)".into();
    }
    let parts: Vec<String> = a.iter().map(|(v, k)| format!("{} = {k}", names.name(*v))).collect();
    parts.join(", ")
}

pub fn verdict(v: &Verdict, names: &VarTable, budget: &Budget) -> String {
    let mut out = format!("{} (theory {})\n", v.status, v.theory);
    match &v.certificate {
        Certificate::Nat(a) => {
            let _ = writeln!(out, "certificate: natural numbers, {}", assignment(a, names));
            if !a.is_empty() {
                out.push_str("  (variables not listed are 0)\n");
            }
        }
        Certificate::Infinity => {
            out.push_str("certificate: every variable set to ∞ in the black-hole model\n");
        }
        Certificate::Witness(cert) => {
            out.push_str("certificate: witness\n");
            out.push_str(&label_table(cert, names, budget));
            out.push_str(&certificate_details(cert, names));
            out.push('\n');
        }
        Certificate::Exhaustion(e) => {
            let _ = write!(
                out,
                "no certificate exists: {} conjunct(s) examined, {} refuted by constants, {} search nodes",
                e.conjuncts, e.refuted_by_constants, e.search_nodes
            );
            if let Some(space) = &e.labelling_space {
                let _ = write!(out, ", labelling space {space}");
            }
            out.push('\n');
        }
    }
    out.truncate(out.trim_end().len());
    out
}

/// The reduced system and the variable labels of a witness.
pub fn certificate_details(cert: &WitnessCertificate, names: &VarTable) -> String {
    let mut out = String::from("reduced system:");
    if cert.reduced_system.is_empty() {
        out.push_str(" (empty)");
    }
    for (c, k) in &cert.reduced_system {
        let _ = write!(out, "\n  0*{} = {}", c.render(names), bnum(k.clone()).render(names));
    }
    let _ = write!(out, "\nassignment: {}", assignment(&cert.assignment, names));
    out.push_str("\n  (unlisted variables denote themselves in the reduced-term model)");
    out
}

/// One row per subterm occurrence: path, subterm, label, the subterm with
/// labelled proper subterms replaced by numerals, and its reduced form.
fn label_table(cert: &WitnessCertificate, names: &VarTable, budget: &Budget) -> String {
    let w = &cert.witness;
    let many = w.system.len() > 1;
    let mut rows: Vec<[String; 6]> = vec![[
        "eq".into(),
        "path".into(),
        "subterm".into(),
        "label".into(),
        "image".into(),
        "reduced".into(),
    ]];
    let small = BigUint::from(SHOW_TERM_NODES);
    for (j, (t, _)) in w.system.iter().enumerate() {
        for (path, u) in subterm_occurrences(t) {
            let label = w.labels[j].get(&path).map_or("-".to_string(), |k| k.to_string());
            let (image, reduced) = match label_image(w, j, &path) {
                Ok(img) => {
                    let d = desc_of_reduced(&img);
                    let reduced = match expand_within(&d, budget) {
                        Ok(nf) if expanded_size(&d) <= small => nf.render(names).to_string(),
                        _ => format!("{} (descriptor)", d.render(names)),
                    };
                    (img.render(names).to_string(), reduced)
                }
                Err(e) => (format!("({e})"), String::new()),
            };
            rows.push([j.to_string(), path.to_string(), u.render(names).to_string(), label, image, reduced]);
        }
    }
    let skip = usize::from(!many);
    let mut widths = [0usize; 6];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(widths)
            .skip(skip)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "  {}", cells.join(" | ").trim_end());
    }
    out
}
