//! Parser and serializer for the application description language.
//!
//! `.adl` files are line oriented, UTF-8, with `#` comments and
//! whitespace-separated tokens:
//!
//! ```text
//! energy startup_uJ=9
//! nvm read base_uJ=1.3 per_byte_nJ=7.6
//! nvm write base_uJ=0.9 per_byte_nJ=6.2
//! packet img 9600
//! task sense energy_uJ=131900 reads=- writes=img
//! repeat k 0..4125 {
//!     packet res_$k 8
//!     task cnn_$k energy_uJ=396 reads=img writes=res_$k
//! }
//! ```
//!
//! File order is execution order. `repeat` ranges are half-open `lo..hi`;
//! blocks expand fully before validation, with `$var` / `${var}` substituted
//! into task and packet names (never into sizes or energy values). Packet
//! references resolve across the whole file, so a task may read a packet
//! declared further down. Parsing is total: it never aborts mid-file and
//! reports every error it can find, each with a 1-based line and column.

use crate::model::{Application, EnergyModel, PacketDef, PacketId, TaskDef};
use std::collections::HashMap;
use std::fmt;

/// 1-based line/column of a token in the source text.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SourcePosition {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourcePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownDirective,
    DuplicatePacket,
    DuplicateTask,
    UndefinedPacket,
    DuplicateWriter,
    ReadBeforeWrite,
    BadNumber,
    BadRepeatRange,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownDirective => "unknown-directive",
            ParseErrorKind::DuplicatePacket => "duplicate-packet",
            ParseErrorKind::DuplicateTask => "duplicate-task",
            ParseErrorKind::UndefinedPacket => "undefined-packet",
            ParseErrorKind::DuplicateWriter => "duplicate-writer",
            ParseErrorKind::ReadBeforeWrite => "read-before-write",
            ParseErrorKind::BadNumber => "bad-number",
            ParseErrorKind::BadRepeatRange => "bad-repeat-range",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: SourcePosition,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.position, self.kind, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A successfully parsed application plus non-fatal warnings (currently:
/// missing `energy`/`nvm` directives defaulting to a zero-cost model).
#[derive(Clone, Debug)]
pub struct ParseOutput {
    pub app: Application,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
struct Token {
    text: String,
    pos: SourcePosition,
}

#[derive(Clone, Debug)]
enum Item {
    Packet {
        name: String,
        size: u64,
        pos: SourcePosition,
    },
    Task {
        name: String,
        energy: f64,
        reads: Vec<String>,
        writes: Vec<String>,
        pos: SourcePosition,
    },
    Repeat {
        var: String,
        lo: u64,
        hi: u64,
        body: Vec<Item>,
        pos: SourcePosition,
    },
}

/// Expansion guard: keeps pathological repeat ranges from exhausting memory.
const MAX_EXPANDED_ITEMS: usize = 4_000_000;

#[derive(Clone, Debug)]
struct ExpandedTask {
    name: String,
    energy: f64,
    reads: Vec<String>,
    writes: Vec<String>,
    pos: SourcePosition,
}

/// Parses ADL text into a validated [`Application`].
///
/// On success the application passes [`crate::validate`] with no
/// diagnostics. On failure every collected error is returned, sorted by
/// source position.
pub fn parse(text: &str) -> Result<ParseOutput, Vec<ParseError>> {
    let mut p = Parser::default();
    p.run(text);
    // Name resolution and the write-once checks run even when earlier
    // phases already failed, so one pass reports as much as it can.
    let app = p.build();
    if p.errors.is_empty() {
        debug_assert!(crate::model::validate(&app).is_empty());
        Ok(ParseOutput {
            app,
            warnings: p.warnings,
        })
    } else {
        let mut errors = p.errors;
        errors.sort_by_key(|e| (e.position.line, e.position.column));
        Err(errors)
    }
}

#[derive(Default)]
struct Parser {
    items: Vec<Item>,
    /// Open repeat blocks: header item plus whether its `{` was consumed.
    stack: Vec<Item>,
    awaiting_brace: bool,
    /// Position of the most recent token, for errors without one of their own.
    cursor: SourcePosition,
    startup: Option<f64>,
    read_cost: Option<(f64, f64)>,
    write_cost: Option<(f64, f64)>,
    errors: Vec<ParseError>,
    warnings: Vec<String>,
    expanded_packets: Vec<(String, u64, SourcePosition)>,
    expanded_tasks: Vec<ExpandedTask>,
}

impl Parser {
    fn error(&mut self, pos: SourcePosition, kind: ParseErrorKind, message: impl Into<String>) {
        self.errors.push(ParseError {
            position: pos,
            kind,
            message: message.into(),
        });
    }

    fn run(&mut self, text: &str) {
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim_end_matches('\r');
            let visible = match line.find('#') {
                Some(cut) => &line[..cut],
                None => line,
            };
            let mut tokens: Vec<Token> = Vec::new();
            let mut start: Option<usize> = None;
            for (ci, ch) in visible.chars().chain(std::iter::once(' ')).enumerate() {
                if ch.is_whitespace() {
                    if let Some(s) = start.take() {
                        tokens.push(Token {
                            text: visible.chars().skip(s).take(ci - s).collect(),
                            pos: SourcePosition {
                                line: line_no,
                                column: s + 1,
                            },
                        });
                    }
                } else if start.is_none() {
                    start = Some(ci);
                }
            }
            if tokens.is_empty() {
                continue;
            }
            self.line(tokens);
        }
        if self.awaiting_brace || !self.stack.is_empty() {
            let pos = match self.stack.last() {
                Some(Item::Repeat { pos, .. }) => *pos,
                _ => self.cursor,
            };
            self.error(pos, ParseErrorKind::Syntax, "unclosed repeat block");
        }
        // Expansion and name resolution still run when earlier errors exist,
        // so one pass reports as much as possible.
        let items = std::mem::take(&mut self.items);
        let mut env = Vec::new();
        let mut count = 0usize;
        self.expand(&items, &mut env, &mut count);
        if self.expanded_tasks.is_empty() && self.errors.is_empty() {
            self.error(
                SourcePosition { line: 1, column: 1 },
                ParseErrorKind::Syntax,
                "no tasks",
            );
        }
    }

    fn line(&mut self, mut tokens: Vec<Token>) {
        self.cursor = tokens[0].pos;
        // Trailing close braces apply after the statement on the same line.
        let mut closes = 0;
        while tokens.last().map(|t| t.text.as_str()) == Some("}") {
            closes += 1;
            tokens.pop();
        }

        if self.awaiting_brace {
            if tokens.first().map(|t| t.text.as_str()) == Some("{") && tokens.len() == 1 {
                self.awaiting_brace = false;
                tokens.clear();
            } else {
                let pos = tokens.first().map(|t| t.pos).unwrap_or(self.cursor);
                self.error(pos, ParseErrorKind::Syntax, "expected '{' after repeat");
                self.awaiting_brace = false;
                // Fall through and parse the line normally.
            }
        }

        if !tokens.is_empty() {
            self.statement(tokens);
        }
        for _ in 0..closes {
            self.close_block();
        }
    }

    fn close_block(&mut self) {
        match self.stack.pop() {
            Some(item) => self.push_item(item),
            None => self.error(self.cursor, ParseErrorKind::Syntax, "unmatched '}'"),
        }
    }

    fn push_item(&mut self, item: Item) {
        match self.stack.last_mut() {
            Some(Item::Repeat { body, .. }) => body.push(item),
            Some(_) => unreachable!("only repeat blocks are stacked"),
            None => self.items.push(item),
        }
    }

    fn statement(&mut self, tokens: Vec<Token>) {
        let head = &tokens[0];
        match head.text.as_str() {
            "energy" => self.directive_energy(&tokens),
            "nvm" => self.directive_nvm(&tokens),
            "packet" => self.stmt_packet(&tokens),
            "task" => self.stmt_task(&tokens),
            "repeat" => self.stmt_repeat(tokens),
            "{" => {
                self.error(head.pos, ParseErrorKind::Syntax, "unexpected '{'");
            }
            other => {
                self.error(
                    head.pos,
                    ParseErrorKind::UnknownDirective,
                    format!("unknown directive '{other}'"),
                );
            }
        }
    }

    fn in_repeat(&self) -> bool {
        !self.stack.is_empty()
    }

    fn directive_energy(&mut self, tokens: &[Token]) {
        let pos = tokens[0].pos;
        if self.in_repeat() {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "'energy' is not allowed inside repeat",
            );
            return;
        }
        if self.startup.is_some() {
            self.error(pos, ParseErrorKind::Syntax, "duplicate 'energy' directive");
            return;
        }
        if tokens.len() != 2 {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "expected: energy startup_uJ=<value>",
            );
            return;
        }
        if let Some(v) = self.keyed_float(&tokens[1], "startup_uJ") {
            self.startup = Some(v);
        }
    }

    fn directive_nvm(&mut self, tokens: &[Token]) {
        let pos = tokens[0].pos;
        if self.in_repeat() {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "'nvm' is not allowed inside repeat",
            );
            return;
        }
        if tokens.len() != 4 {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "expected: nvm <read|write> base_uJ=<v> per_byte_nJ=<v>",
            );
            return;
        }
        let dir = tokens[1].text.as_str();
        if dir != "read" && dir != "write" {
            self.error(
                tokens[1].pos,
                ParseErrorKind::Syntax,
                format!("expected 'read' or 'write', got '{dir}'"),
            );
            return;
        }
        let base = self.keyed_float(&tokens[2], "base_uJ");
        let per_byte = self.keyed_float(&tokens[3], "per_byte_nJ");
        let (Some(base), Some(per_byte)) = (base, per_byte) else {
            return;
        };
        let slot = if dir == "read" {
            &mut self.read_cost
        } else {
            &mut self.write_cost
        };
        if slot.is_some() {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                format!("duplicate 'nvm {dir}' directive"),
            );
        } else {
            *slot = Some((base, per_byte));
        }
    }

    fn stmt_packet(&mut self, tokens: &[Token]) {
        let pos = tokens[0].pos;
        if tokens.len() != 3 {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "expected: packet <name> <size_bytes>",
            );
            return;
        }
        let Some(name) = self.name_template(&tokens[1]) else {
            return;
        };
        let size_tok = &tokens[2];
        if size_tok.text.contains('$') {
            self.error(
                size_tok.pos,
                ParseErrorKind::Syntax,
                "substitution is not supported inside sizes",
            );
            return;
        }
        let Ok(size) = size_tok.text.parse::<u64>() else {
            self.error(
                size_tok.pos,
                ParseErrorKind::BadNumber,
                format!("invalid packet size '{}'", size_tok.text),
            );
            return;
        };
        self.push_item(Item::Packet { name, size, pos });
    }

    fn stmt_task(&mut self, tokens: &[Token]) {
        let pos = tokens[0].pos;
        if tokens.len() != 5 {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "expected: task <name> energy_uJ=<v> reads=<p,..|-> writes=<p,..|->",
            );
            return;
        }
        let Some(name) = self.name_template(&tokens[1]) else {
            return;
        };
        let energy = self.keyed_float(&tokens[2], "energy_uJ");
        let reads = self.keyed_list(&tokens[3], "reads");
        let writes = self.keyed_list(&tokens[4], "writes");
        let (Some(energy), Some(reads), Some(writes)) = (energy, reads, writes) else {
            return;
        };
        self.push_item(Item::Task {
            name,
            energy,
            reads,
            writes,
            pos,
        });
    }

    fn stmt_repeat(&mut self, mut tokens: Vec<Token>) {
        let pos = tokens[0].pos;
        let mut has_brace = false;
        if tokens.last().map(|t| t.text.as_str()) == Some("{") {
            has_brace = true;
            tokens.pop();
        }
        if tokens.len() != 3 {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                "expected: repeat <var> <lo>..<hi> {",
            );
            return;
        }
        let var = tokens[1].text.clone();
        if !is_plain_name(&var) {
            self.error(
                tokens[1].pos,
                ParseErrorKind::Syntax,
                format!("invalid repeat variable '{var}'"),
            );
            return;
        }
        let range = &tokens[2];
        let Some((lo_s, hi_s)) = range.text.split_once("..") else {
            self.error(
                range.pos,
                ParseErrorKind::Syntax,
                format!("expected <lo>..<hi>, got '{}'", range.text),
            );
            return;
        };
        let (Ok(lo), Ok(hi)) = (lo_s.parse::<u64>(), hi_s.parse::<u64>()) else {
            self.error(
                range.pos,
                ParseErrorKind::BadNumber,
                format!("invalid repeat bounds '{}'", range.text),
            );
            return;
        };
        if hi < lo {
            self.error(
                range.pos,
                ParseErrorKind::BadRepeatRange,
                format!("repeat range {lo}..{hi} is reversed"),
            );
            return;
        }
        for frame in &self.stack {
            if let Item::Repeat { var: outer, .. } = frame {
                if *outer == var {
                    self.error(
                        tokens[1].pos,
                        ParseErrorKind::Syntax,
                        format!("repeat variable '{var}' shadows an outer repeat"),
                    );
                    return;
                }
            }
        }
        self.stack.push(Item::Repeat {
            var,
            lo,
            hi,
            body: Vec::new(),
            pos,
        });
        self.awaiting_brace = !has_brace;
    }

    fn keyed_value<'t>(&mut self, token: &'t Token, key: &str) -> Option<&'t str> {
        match token.text.split_once('=') {
            Some((k, v)) if k == key => Some(v),
            _ => {
                self.error(
                    token.pos,
                    ParseErrorKind::Syntax,
                    format!("expected {key}=<value>, got '{}'", token.text),
                );
                None
            }
        }
    }

    fn keyed_float(&mut self, token: &Token, key: &str) -> Option<f64> {
        let text = self.keyed_value(token, key)?.to_string();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Some(v),
            _ => {
                self.error(
                    token.pos,
                    ParseErrorKind::BadNumber,
                    format!("{key} must be a non-negative decimal, got '{text}'"),
                );
                None
            }
        }
    }

    fn keyed_list(&mut self, token: &Token, key: &str) -> Option<Vec<String>> {
        let text = self.keyed_value(token, key)?.to_string();
        if text == "-" {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        for part in text.split(',') {
            if part.is_empty() {
                self.error(
                    token.pos,
                    ParseErrorKind::Syntax,
                    format!("empty name in {key} list"),
                );
                return None;
            }
            out.push(part.to_string());
        }
        Some(out)
    }

    /// Accepts a possibly-templated name: `[A-Za-z_]` first, then
    /// `[A-Za-z0-9_$]` plus `{`/`}` for the `${var}` form.
    fn name_template(&mut self, token: &Token) -> Option<String> {
        let text = &token.text;
        let mut chars = text.chars();
        let ok = match chars.next() {
            Some(c) => c.is_ascii_alphabetic() || c == '_',
            None => false,
        } && chars
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '$' | '{' | '}'));
        if ok {
            Some(text.clone())
        } else {
            self.error(
                token.pos,
                ParseErrorKind::Syntax,
                format!("invalid name '{text}'"),
            );
            None
        }
    }

    fn expand(&mut self, items: &[Item], env: &mut Vec<(String, u64)>, count: &mut usize) {
        for item in items {
            *count += 1;
            if *count > MAX_EXPANDED_ITEMS {
                let pos = item_pos(item);
                self.error(
                    pos,
                    ParseErrorKind::BadRepeatRange,
                    format!("expansion exceeds {MAX_EXPANDED_ITEMS} items"),
                );
                return;
            }
            match item {
                Item::Packet { name, size, pos } => {
                    if let Some(name) = self.substitute(name, env, *pos) {
                        self.expanded_packets.push((name, *size, *pos));
                    }
                }
                Item::Task {
                    name,
                    energy,
                    reads,
                    writes,
                    pos,
                } => {
                    let name = self.substitute(name, env, *pos);
                    let reads: Option<Vec<String>> = reads
                        .iter()
                        .map(|r| self.substitute(r, env, *pos))
                        .collect();
                    let writes: Option<Vec<String>> = writes
                        .iter()
                        .map(|w| self.substitute(w, env, *pos))
                        .collect();
                    if let (Some(name), Some(reads), Some(writes)) = (name, reads, writes) {
                        self.expanded_tasks.push(ExpandedTask {
                            name,
                            energy: *energy,
                            reads,
                            writes,
                            pos: *pos,
                        });
                    }
                }
                Item::Repeat {
                    var, lo, hi, body, ..
                } => {
                    for v in *lo..*hi {
                        env.push((var.clone(), v));
                        self.expand(body, env, count);
                        env.pop();
                        if *count > MAX_EXPANDED_ITEMS {
                            return;
                        }
                    }
                }
            }
        }
    }

    fn substitute(
        &mut self,
        template: &str,
        env: &[(String, u64)],
        pos: SourcePosition,
    ) -> Option<String> {
        let mut out = String::with_capacity(template.len());
        let mut chars = template.chars().peekable();
        while let Some(c) = chars.next() {
            if c != '$' {
                out.push(c);
                continue;
            }
            let braced = chars.peek() == Some(&'{');
            if braced {
                chars.next();
            }
            let mut var = String::new();
            while let Some(&nc) = chars.peek() {
                if nc.is_ascii_alphanumeric() || nc == '_' {
                    var.push(nc);
                    chars.next();
                } else {
                    break;
                }
            }
            if braced && chars.next() != Some('}') {
                self.error(
                    pos,
                    ParseErrorKind::Syntax,
                    format!("unterminated ${{...}} in '{template}'"),
                );
                return None;
            }
            if var.is_empty() {
                self.error(
                    pos,
                    ParseErrorKind::Syntax,
                    format!("dangling '$' in '{template}'"),
                );
                return None;
            }
            match env.iter().rev().find(|(name, _)| *name == var) {
                Some((_, value)) => out.push_str(&value.to_string()),
                None => {
                    self.error(
                        pos,
                        ParseErrorKind::Syntax,
                        format!("undefined repeat variable '${var}' in '{template}'"),
                    );
                    return None;
                }
            }
        }
        if is_plain_name(&out) {
            Some(out)
        } else {
            self.error(
                pos,
                ParseErrorKind::Syntax,
                format!("'{template}' expands to invalid name '{out}'"),
            );
            None
        }
    }

    fn build(&mut self) -> Application {
        if self.startup.is_none() {
            self.warnings
                .push("no 'energy' directive; startup cost defaults to 0".into());
        }
        if self.read_cost.is_none() {
            self.warnings
                .push("no 'nvm read' directive; read cost defaults to 0".into());
        }
        if self.write_cost.is_none() {
            self.warnings
                .push("no 'nvm write' directive; write cost defaults to 0".into());
        }
        let (read_base, read_per_byte_nj) = self.read_cost.unwrap_or((0.0, 0.0));
        let (write_base, write_per_byte_nj) = self.write_cost.unwrap_or((0.0, 0.0));
        let model = EnergyModel {
            startup: self.startup.unwrap_or(0.0),
            read_base,
            read_per_byte_nj,
            write_base,
            write_per_byte_nj,
        };

        let mut packet_ids: HashMap<String, PacketId> = HashMap::new();
        let mut packets = Vec::new();
        for (name, size, pos) in std::mem::take(&mut self.expanded_packets) {
            if packet_ids.contains_key(&name) {
                self.error(
                    pos,
                    ParseErrorKind::DuplicatePacket,
                    format!("packet '{name}' declared twice"),
                );
                continue;
            }
            packet_ids.insert(name.clone(), PacketId(packets.len() as u32));
            packets.push(PacketDef { name, size });
        }

        let mut task_names: HashMap<String, usize> = HashMap::new();
        let mut tasks: Vec<TaskDef> = Vec::new();
        let mut task_pos = Vec::new();
        for task in std::mem::take(&mut self.expanded_tasks) {
            let pos = task.pos;
            if task_names.contains_key(&task.name) {
                self.error(
                    pos,
                    ParseErrorKind::DuplicateTask,
                    format!("task '{}' declared twice", task.name),
                );
                continue;
            }
            task_names.insert(task.name.clone(), tasks.len() + 1);
            let mut resolve = |names: &[String]| -> Vec<PacketId> {
                let mut out = Vec::with_capacity(names.len());
                for n in names {
                    match packet_ids.get(n) {
                        Some(&id) => {
                            if !out.contains(&id) {
                                out.push(id);
                            }
                        }
                        None => self.errors.push(ParseError {
                            position: pos,
                            kind: ParseErrorKind::UndefinedPacket,
                            message: format!("packet '{n}' is not declared"),
                        }),
                    }
                }
                out
            };
            let reads = resolve(&task.reads);
            let writes = resolve(&task.writes);
            tasks.push(TaskDef {
                name: task.name,
                energy: task.energy,
                reads,
                writes,
            });
            task_pos.push(pos);
        }

        // Write-once / write-before-read checks, in execution order.
        let mut writer: Vec<Option<usize>> = vec![None; packets.len()];
        for (t, task) in tasks.iter().enumerate() {
            let pos = task_pos[t];
            let index = t + 1;
            for &p in &task.writes {
                match writer[p.index()] {
                    None => writer[p.index()] = Some(index),
                    Some(first) => self.errors.push(ParseError {
                        position: pos,
                        kind: ParseErrorKind::DuplicateWriter,
                        message: format!(
                            "packet '{}' already written by task {} ('{}')",
                            packets[p.index()].name,
                            first,
                            tasks[first - 1].name
                        ),
                    }),
                }
            }
        }
        for (t, task) in tasks.iter().enumerate() {
            let pos = task_pos[t];
            let index = t + 1;
            for &p in &task.reads {
                let name = &packets[p.index()].name;
                match writer[p.index()] {
                    Some(w) if w < index => {}
                    Some(w) if w == index => self.errors.push(ParseError {
                        position: pos,
                        kind: ParseErrorKind::ReadBeforeWrite,
                        message: format!("packet '{name}' read by its own writer task {index}"),
                    }),
                    Some(w) => self.errors.push(ParseError {
                        position: pos,
                        kind: ParseErrorKind::ReadBeforeWrite,
                        message: format!(
                            "read-before-write: packet '{name}' read at task {index} but written at task {w}"
                        ),
                    }),
                    None => self.errors.push(ParseError {
                        position: pos,
                        kind: ParseErrorKind::ReadBeforeWrite,
                        message: format!(
                            "packet '{name}' read at task {index} but never written"
                        ),
                    }),
                }
            }
        }

        Application::from_parts(model, packets, tasks)
    }
}

fn item_pos(item: &Item) -> SourcePosition {
    match item {
        Item::Packet { pos, .. } | Item::Task { pos, .. } | Item::Repeat { pos, .. } => *pos,
    }
}

fn is_plain_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Serializes an application back to ADL text. Repeat blocks are not
/// reconstructed; output is flat, in declaration/execution order, with
/// shortest round-trip decimal formatting. Reparsing yields an identical
/// application.
pub fn to_adl(app: &Application) -> String {
    let mut out = String::new();
    let m = app.model();
    out.push_str(&format!("energy startup_uJ={}\n", m.startup));
    out.push_str(&format!(
        "nvm read base_uJ={} per_byte_nJ={}\n",
        m.read_base, m.read_per_byte_nj
    ));
    out.push_str(&format!(
        "nvm write base_uJ={} per_byte_nJ={}\n",
        m.write_base, m.write_per_byte_nj
    ));
    for p in app.packets() {
        out.push_str(&format!("packet {} {}\n", p.name, p.size));
    }
    let list = |ids: &[PacketId]| -> String {
        if ids.is_empty() {
            "-".to_string()
        } else {
            ids.iter()
                .map(|&id| app.packet(id).name.clone())
                .collect::<Vec<_>>()
                .join(",")
        }
    };
    for t in app.tasks() {
        out.push_str(&format!(
            "task {} energy_uJ={} reads={} writes={}\n",
            t.name,
            t.energy,
            list(&t.reads),
            list(&t.writes)
        ));
    }
    out
}
