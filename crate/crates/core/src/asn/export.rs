use std::fmt::Write as _;

use super::Asn;

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn rules_label(rules: &std::collections::BTreeSet<crate::corpus::PhraseRule>) -> String {
    rules.iter().map(|r| r.as_str()).collect::<Vec<_>>().join("|")
}

/// Graphviz DOT. `comments` become `//` lines ahead of the graph.
pub fn to_dot(asn: &Asn, comments: &[String]) -> String {
    let index = asn.node_index();
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "// {c}");
    }
    out.push_str("digraph asn {\n");
    if let Some(c) = asn.century() {
        let _ = writeln!(out, "  graph [century={c}];");
    }
    for (i, (key, attrs)) in asn.nodes().iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\", role=\"{}\", lemma=\"{}\", frequency={}];",
            dot_escape(&key.to_string()),
            key.role,
            dot_escape(&key.lemma),
            attrs.frequency
        );
    }
    for ((s, d), e) in asn.edges() {
        let _ = writeln!(
            out,
            "  n{} -> n{} [weight={}, rules=\"{}\"];",
            index[s],
            index[d],
            e.weight,
            rules_label(&e.rules)
        );
    }
    out.push_str("}\n");
    out
}

/// GraphML with node attributes lemma/role/frequency and edge attributes weight/rules.
pub fn to_graphml(asn: &Asn, comments: &[String]) -> String {
    let index = asn.node_index();
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    for c in comments {
        let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
    }
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"lemma\" for=\"node\" attr.name=\"lemma\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"frequency\" for=\"node\" attr.name=\"frequency\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"rules\" for=\"edge\" attr.name=\"rules\" attr.type=\"string\"/>\n");
    let id = asn
        .century()
        .map_or_else(|| "asn".to_owned(), |c| format!("asn-{c}"));
    let _ = writeln!(out, "  <graph id=\"{id}\" edgedefault=\"directed\">");
    for (i, (key, attrs)) in asn.nodes().iter().enumerate() {
        let _ = writeln!(out, "    <node id=\"n{i}\">");
        let _ = writeln!(out, "      <data key=\"lemma\">{}</data>", xml_escape(&key.lemma));
        let _ = writeln!(out, "      <data key=\"role\">{}</data>", key.role);
        let _ = writeln!(out, "      <data key=\"frequency\">{}</data>", attrs.frequency);
        out.push_str("    </node>\n");
    }
    for (j, ((s, d), e)) in asn.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{j}\" source=\"n{}\" target=\"n{}\">",
            index[s], index[d]
        );
        let _ = writeln!(out, "      <data key=\"weight\">{}</data>", e.weight);
        let _ = writeln!(out, "      <data key=\"rules\">{}</data>", rules_label(&e.rules));
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Edge list `source_role,source_lemma,target_role,target_lemma,weight`.
/// `comments` become leading `#` lines.
pub fn to_csv(asn: &Asn, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("source_role,source_lemma,target_role,target_lemma,weight\n");
    for ((s, d), e) in asn.edges() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.role,
            csv_field(&s.lemma),
            d.role,
            csv_field(&d.lemma),
            e.weight
        );
    }
    out
}
