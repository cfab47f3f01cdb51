use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{read_file, EvalError};

/// An information need with three text granularities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: u32,
    pub query: String,
    pub question: String,
    pub narrative: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopicField {
    Query,
    Question,
    Narrative,
    /// Mean of the three field embeddings; only meaningful in vector space.
    Average,
    /// The three field texts joined with spaces.
    Combined,
}

impl TopicField {
    pub const NAMED: [TopicField; 3] = [TopicField::Query, TopicField::Question, TopicField::Narrative];
}

impl fmt::Display for TopicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopicField::Query => "query",
            TopicField::Question => "question",
            TopicField::Narrative => "narrative",
            TopicField::Average => "average",
            TopicField::Combined => "combined",
        })
    }
}

impl FromStr for TopicField {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "query" => Ok(TopicField::Query),
            "question" => Ok(TopicField::Question),
            "narrative" => Ok(TopicField::Narrative),
            "average" => Ok(TopicField::Average),
            "combined" => Ok(TopicField::Combined),
            other => Err(EvalError::UnknownTopicField(other.to_string())),
        }
    }
}

impl Topic {
    /// Text for a field; `None` for `average`, which has no text form.
    pub fn text(&self, field: TopicField) -> Option<String> {
        match field {
            TopicField::Query => Some(self.query.clone()),
            TopicField::Question => Some(self.question.clone()),
            TopicField::Narrative => Some(self.narrative.clone()),
            TopicField::Combined => Some(format!("{} {} {}", self.query, self.question, self.narrative)),
            TopicField::Average => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopicFormat {
    Csv,
    Xml,
}

impl TopicFormat {
    /// Guess from the file extension; anything but `.xml` is read as csv.
    pub fn from_path(path: &Path) -> TopicFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("xml") => TopicFormat::Xml,
            _ => TopicFormat::Csv,
        }
    }
}

impl FromStr for TopicFormat {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(TopicFormat::Csv),
            "xml" => Ok(TopicFormat::Xml),
            other => Err(EvalError::UnknownTopicFormat(other.to_string())),
        }
    }
}

pub fn load_topics(path: &Path, format: TopicFormat) -> Result<Vec<Topic>, EvalError> {
    let text = read_file(path)?;
    match format {
        TopicFormat::Csv => parse_topics_csv(&text),
        TopicFormat::Xml => parse_topics_xml(&text),
    }
}

fn check_unique(topics: &[Topic]) -> Result<(), EvalError> {
    let mut seen = HashSet::new();
    for t in topics {
        if !seen.insert(t.topic_id) {
            return Err(EvalError::DuplicateTopicId(t.topic_id));
        }
    }
    Ok(())
}

fn make_topic(
    position: usize,
    id: &str,
    query: &str,
    question: &str,
    narrative: &str,
) -> Result<Topic, EvalError> {
    let topic_id = id
        .trim()
        .parse()
        .map_err(|_| EvalError::MalformedRecord(position))?;
    let [query, question, narrative] = [query, question, narrative].map(|s| s.trim().to_string());
    if query.is_empty() || question.is_empty() || narrative.is_empty() {
        return Err(EvalError::MalformedRecord(position));
    }
    Ok(Topic {
        topic_id,
        query,
        question,
        narrative,
    })
}

/// Header `topic-id,query,question,narrative`; column order is free.
pub fn parse_topics_csv(text: &str) -> Result<Vec<Topic>, EvalError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|_| EvalError::MalformedRecord(0))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(EvalError::MalformedRecord(0))
    };
    let cols = [col("topic-id")?, col("query")?, col("question")?, col("narrative")?];

    let mut topics = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let position = i + 1;
        let record = record.map_err(|_| EvalError::MalformedRecord(position))?;
        let field = |c: usize| record.get(c).unwrap_or("");
        topics.push(make_topic(
            position,
            field(cols[0]),
            field(cols[1]),
            field(cols[2]),
            field(cols[3]),
        )?);
    }
    check_unique(&topics)?;
    Ok(topics)
}

/// `<topic number="N">` elements with `query`, `question` and `narrative` children.
pub fn parse_topics_xml(text: &str) -> Result<Vec<Topic>, EvalError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| EvalError::MalformedXml(e.to_string()))?;
    let mut topics = Vec::new();
    for (i, node) in doc
        .descendants()
        .filter(|n| n.has_tag_name("topic"))
        .enumerate()
    {
        let position = i + 1;
        let child_text = |name: &str| -> String {
            node.children()
                .find(|c| c.has_tag_name(name))
                .map(|c| {
                    c.descendants()
                        .filter(|d| d.is_text())
                        .filter_map(|d| d.text())
                        .collect::<String>()
                })
                .unwrap_or_default()
        };
        let number = node
            .attribute("number")
            .ok_or(EvalError::MalformedRecord(position))?;
        topics.push(make_topic(
            position,
            number,
            &child_text("query"),
            &child_text("question"),
            &child_text("narrative"),
        )?);
    }
    check_unique(&topics)?;
    Ok(topics)
}

pub fn write_topics_csv<W: Write>(topics: &[Topic], out: W) -> Result<(), EvalError> {
    let mut writer = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| EvalError::Io(e.into());
    writer
        .write_record(["topic-id", "query", "question", "narrative"])
        .map_err(to_io)?;
    for t in topics {
        writer
            .write_record([t.topic_id.to_string().as_str(), &t.query, &t.question, &t.narrative])
            .map_err(to_io)?;
    }
    writer.flush()?;
    Ok(())
}

fn escape_xml(s: &str) -> String {
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

pub fn write_topics_xml<W: Write>(topics: &[Topic], mut out: W) -> Result<(), EvalError> {
    writeln!(out, "<topics>")?;
    for t in topics {
        writeln!(out, "  <topic number=\"{}\">", t.topic_id)?;
        writeln!(out, "    <query>{}</query>", escape_xml(&t.query))?;
        writeln!(out, "    <question>{}</question>", escape_xml(&t.question))?;
        writeln!(out, "    <narrative>{}</narrative>", escape_xml(&t.narrative))?;
        writeln!(out, "  </topic>")?;
    }
    writeln!(out, "</topics>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "topic-id,query,question,narrative\n\
        1,coronavirus origin,what is the origin of COVID-19?,\"seeking range of information, about the origin\"\n\
        2,coronavirus response to weather changes,How does the coronavirus respond to changes in the weather?,Seeking information\n";

    const XML: &str = r#"<topics task="COVIDSearch">
  <topic number="1">
    <query>coronavirus origin</query>
    <question>what is the origin of COVID-19?</question>
    <narrative>seeking range of information, about the origin</narrative>
  </topic>
  <topic number="2">
    <query>coronavirus response to weather changes</query>
    <question>How does the coronavirus respond to changes in the weather?</question>
    <narrative>
      Seeking information
    </narrative>
  </topic>
</topics>"#;

    #[test]
    fn csv_and_xml_agree() {
        let from_csv = parse_topics_csv(CSV).unwrap();
        let from_xml = parse_topics_xml(XML).unwrap();
        assert_eq!(from_csv.len(), 2);
        assert_eq!(from_csv, from_xml);
    }

    #[test]
    fn duplicate_ids() {
        let text = "topic-id,query,question,narrative\n1,a,b,c\n1,d,e,f\n";
        assert!(matches!(parse_topics_csv(text), Err(EvalError::DuplicateTopicId(1))));
    }

    #[test]
    fn empty_field_is_malformed() {
        let text = "topic-id,query,question,narrative\n1,a,,c\n";
        assert!(matches!(parse_topics_csv(text), Err(EvalError::MalformedRecord(1))));
        let xml = r#"<topics><topic number="x"><query>a</query><question>b</question><narrative>c</narrative></topic></topics>"#;
        assert!(matches!(parse_topics_xml(xml), Err(EvalError::MalformedRecord(1))));
    }

    #[test]
    fn writers_round_trip() {
        let topics = vec![Topic {
            topic_id: 3,
            query: "a & b <c>".into(),
            question: "\"quoted\", with comma?".into(),
            narrative: "it's".into(),
        }];
        let mut csv_buf = Vec::new();
        write_topics_csv(&topics, &mut csv_buf).unwrap();
        let mut xml_buf = Vec::new();
        write_topics_xml(&topics, &mut xml_buf).unwrap();
        assert_eq!(parse_topics_csv(std::str::from_utf8(&csv_buf).unwrap()).unwrap(), topics);
        assert_eq!(parse_topics_xml(std::str::from_utf8(&xml_buf).unwrap()).unwrap(), topics);
    }

    #[test]
    fn field_names() {
        for name in ["query", "question", "narrative", "average", "combined"] {
            assert_eq!(name.parse::<TopicField>().unwrap().to_string(), name);
        }
        assert!("title".parse::<TopicField>().is_err());
    }
}
