//! Run reports in the stable JSON schema and a human-readable text form.

use serde::Serialize;

use gallery_core::geom::Polygon;
use gallery_core::rational::format_rat;
use gallery_core::structured::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown report format `{other}` (json or text)")),
        }
    }
}

/// One guard's position: exact coordinates plus its vertex id in the
/// working polygon of the solved variant.
#[derive(Debug, Clone, Serialize)]
pub struct GuardPoint {
    pub x: String,
    pub y: String,
    pub vertex: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub answer: String,
    pub k: usize,
    pub variant: String,
    pub guards: Option<Vec<GuardPoint>>,
    #[serde(rename = "guessesTried")]
    pub guesses_tried: u64,
    #[serde(rename = "elapsedMs")]
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn new(
        variant: Variant,
        k: usize,
        guards: Option<&[usize]>,
        work: &Polygon,
        guesses_tried: u64,
        elapsed_ms: u64,
    ) -> RunReport {
        let guards = guards.map(|ids| {
            ids.iter()
                .map(|&id| {
                    let p = work.point(id);
                    GuardPoint {
                        x: format_rat(&p.x),
                        y: format_rat(&p.y),
                        vertex: id,
                    }
                })
                .collect()
        });
        RunReport {
            answer: if guards.is_some() { "yes" } else { "no" }.to_string(),
            k,
            variant: variant.token().to_string(),
            guards,
            guesses_tried,
            elapsed_ms,
        }
    }

    pub fn print(&self, format: ReportFormat) {
        match format {
            ReportFormat::Json => {
                println!("{}", serde_json::to_string(self).expect("report serializes"));
            }
            ReportFormat::Text => {
                println!("answer: {}", self.answer);
                println!("k: {}", self.k);
                println!("variant: {}", self.variant);
                match &self.guards {
                    None => println!("guards: -"),
                    Some(guards) => {
                        let rendered: Vec<String> = guards
                            .iter()
                            .map(|g| format!("({}, {}) @v{}", g.x, g.y, g.vertex))
                            .collect();
                        println!("guards: {}", rendered.join(", "));
                    }
                }
                println!("guessesTried: {}", self.guesses_tried);
                println!("elapsedMs: {}", self.elapsed_ms);
            }
        }
    }
}
