use std::fmt::Write;

use basispath::decompose::Region;
use basispath::verify::VerificationCertificate;
use basispath::{Cfg, FlawReport};

pub fn flaws_text(name: &str, cfg: Option<&Cfg>, report: &FlawReport) -> String {
    let mut s = String::new();
    if report.flaws.is_empty() {
        writeln!(s, "{name}: no flaws").unwrap();
        return s;
    }
    let tag = if report.blocking { ", blocking" } else { "" };
    writeln!(s, "{name}: {} flaw(s){tag}", report.flaws.len()).unwrap();
    for f in &report.flaws {
        write!(s, "  {}: {}", f.kind, f.message).unwrap();
        if let Some(g) = cfg {
            let nodes: Vec<&str> = f
                .nodes
                .iter()
                .filter(|n| n.0 < g.node_count())
                .map(|&n| g.node_name(n))
                .collect();
            if !nodes.is_empty() {
                write!(s, " [{}]", nodes.join(", ")).unwrap();
            }
        }
        s.push('\n');
    }
    s
}

pub fn certificate_text(cfg: &Cfg, cert: &VerificationCertificate) -> String {
    let mut s = String::new();
    writeln!(s, "{}", cert.summary()).unwrap();
    for why in &cert.invalid {
        writeln!(s, "invalid {why}").unwrap();
    }
    let cov = &cert.coverage;
    writeln!(s, "coverage: {}/{} edges", cov.covered, cov.total).unwrap();
    if !cov.missing.is_empty() {
        let gap: Vec<String> = cov.missing.iter().map(|&e| cfg.edge_token(e)).collect();
        writeln!(s, "uncovered: {}", gap.join(" ")).unwrap();
    }
    if let Some(acc) = &cert.accounting {
        let blocks: i64 = acc.blocks.iter().map(|c| c - 1).sum();
        let loops: i64 = acc.loops.iter().sum();
        writeln!(
            s,
            "accounting: 1 + {blocks} (blocks) + {loops} (loops) = {}, residual {}",
            acc.total, acc.residual
        )
        .unwrap();
        writeln!(s, "{:<10} {:>8} {:>8}", "region", "expected", "observed").unwrap();
        for r in &acc.regions {
            let name = match r.region {
                Region::Block(i) => format!("block {i}"),
                Region::Loop(i) => format!("loop {i}"),
            };
            writeln!(s, "{name:<10} {:>8} {:>8}", r.expected, r.observed).unwrap();
        }
        if !acc.unlocalized.is_empty() {
            let ids: Vec<String> = acc.unlocalized.iter().map(|i| i.to_string()).collect();
            writeln!(s, "unlocalized paths: {}", ids.join(", ")).unwrap();
        }
    }
    s
}
