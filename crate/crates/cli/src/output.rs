use std::collections::BTreeMap;

use clap::ValueEnum;
use latmed::{CheckReport, Verdict, Witness};
use serde::Serialize;
use serde_json::Value as Json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// One command's outcome. Serialises as a single JSON line with a fixed
/// field order; the text form prints the same verdict and witnesses.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub counts: BTreeMap<String, u64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Json>,
    #[serde(skip)]
    lines: Vec<String>,
    #[serde(skip)]
    result_text: Option<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            verdict: Verdict::Pass,
            witnesses: Vec::new(),
            counts: BTreeMap::new(),
            seed,
            result: None,
            lines: Vec::new(),
            result_text: None,
        }
    }

    pub fn input(&mut self, key: &str, value: String) {
        self.inputs.insert(key.to_string(), value);
    }

    pub fn count(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }

    pub fn line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn set_result(&mut self, json: Json, text: String) {
        self.result = Some(json);
        self.result_text = Some(text);
    }

    /// Folds a verdict and its witnesses into the report.
    pub fn absorb(&mut self, verdict: Verdict, witnesses: &[Witness]) {
        self.verdict = match (self.verdict, verdict) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::SampledPass, _) | (_, Verdict::SampledPass) => Verdict::SampledPass,
            _ => Verdict::Pass,
        };
        self.witnesses.extend_from_slice(witnesses);
    }

    pub fn check(&mut self, r: &CheckReport) {
        self.line(format!("{} {} ({} examined)", r.law, r.verdict, r.examined));
        self.count(&format!("{}_examined", r.law), r.examined);
        self.absorb(r.verdict, r.witness.as_slice());
    }

    pub fn emit(&self, format: Format) {
        match format {
            Format::Json => {
                println!("{}", serde_json::to_string(self).expect("reports serialise"));
            }
            Format::Text => print!("{}", self.text()),
        }
    }

    /// The plain value for `median` and `to`, otherwise a full listing.
    pub fn text(&self) -> String {
        if let (Some(t), true) = (&self.result_text, self.lines.is_empty()) {
            return format!("{t}\n");
        }
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        for w in &self.witnesses {
            out.push_str(&format!("witness {w}\n"));
        }
        if !self.counts.is_empty() {
            let counts: Vec<String> = self.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!("counts: {}\n", counts.join(" ")));
        }
        if let Some(t) = &self.result_text {
            out.push_str(&format!("result: {t}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}
