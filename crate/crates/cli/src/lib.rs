//! The `coopq` REPL and the backends it can talk to.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use coopq_client::Client;
use coopq_core::kb::KnowledgeBase;
use coopq_core::parser::{SessionDefaults, GRAMMAR};
use coopq_core::session::Session;
use coopq_core::trace::{render_frames, TraceDoc};

/// Something that answers turns.
pub trait Backend {
    fn turn(&mut self, text: &str) -> anyhow::Result<(String, TraceDoc)>;
}

/// Runs the dialogue engine in this process.
pub struct LocalBackend(Session);

impl LocalBackend {
    pub fn new(kb: Arc<KnowledgeBase>, defaults: SessionDefaults) -> anyhow::Result<Self> {
        Ok(LocalBackend(Session::new(kb, defaults)?))
    }
}

impl Backend for LocalBackend {
    fn turn(&mut self, text: &str) -> anyhow::Result<(String, TraceDoc)> {
        let (answer, trace) = self.0.run_turn(text);
        Ok((answer, TraceDoc::from(&trace)))
    }
}

/// Talks to a running service, one session per REPL.
pub struct RemoteBackend {
    runtime: tokio::runtime::Runtime,
    client: Client,
    session: String,
}

impl RemoteBackend {
    pub fn connect(base_url: &str, home_city: Option<&str>) -> anyhow::Result<Self> {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(1)
            .enable_all()
            .build()?;
        let client = Client::new(base_url);
        let session = runtime.block_on(client.create_session(home_city))?;
        Ok(RemoteBackend {
            runtime,
            client,
            session,
        })
    }
}

impl Backend for RemoteBackend {
    fn turn(&mut self, text: &str) -> anyhow::Result<(String, TraceDoc)> {
        let resp = self.runtime.block_on(self.client.send_turn(&self.session, text))?;
        Ok((resp.answer, resp.trace))
    }
}

impl Drop for RemoteBackend {
    fn drop(&mut self) {
        let _ = self.runtime.block_on(self.client.delete_session(&self.session));
    }
}

pub struct ReplOptions {
    pub trace: bool,
    pub prompt: bool,
}

fn print_trace(out: &mut impl Write, trace: &TraceDoc) -> io::Result<()> {
    write!(out, "{}", render_frames(&trace.frames))?;
    let relation = serde_json::to_value(trace.relation).unwrap_or_default();
    writeln!(
        out,
        "relation: {}  licensed: {}",
        relation.as_str().unwrap_or("?"),
        trace.licensed
    )?;
    for sem in &trace.sems {
        writeln!(out, "sem: {}", serde_json::to_string(sem).unwrap_or_default())?;
    }
    if let Some(err) = &trace.error {
        writeln!(out, "error: {}", err.message)?;
    }
    Ok(())
}

/// Read questions line by line until EOF or `quit`. Blank lines are skipped.
pub fn run_repl(
    backend: &mut dyn Backend,
    input: impl BufRead,
    mut out: impl Write,
    options: &ReplOptions,
) -> anyhow::Result<()> {
    let prompt = |out: &mut dyn Write| -> io::Result<()> {
        if options.prompt {
            write!(out, "> ")?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(&mut out)?;
    for line in input.lines() {
        let line = line?;
        let text = line.trim();
        match text {
            "" => {}
            "quit" | "exit" => break,
            "help" => writeln!(out, "{GRAMMAR}")?,
            _ => {
                let (answer, trace) = backend.turn(text)?;
                writeln!(out, "{answer}")?;
                if options.trace {
                    print_trace(&mut out, &trace)?;
                }
            }
        }
        prompt(&mut out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use coopq_core::fixtures::FLIGHTS_KB;
    use coopq_core::kb::load_kb;

    struct Echo(Vec<String>);

    impl Backend for Echo {
        fn turn(&mut self, text: &str) -> anyhow::Result<(String, TraceDoc)> {
            self.0.push(text.to_string());
            let mut session = Session::new(Arc::new(load_kb(FLIGHTS_KB).unwrap()), SessionDefaults::default())?;
            let (answer, trace) = session.run_turn(text);
            Ok((answer, TraceDoc::from(&trace)))
        }
    }

    #[test]
    fn blank_lines_and_commands() {
        let mut backend = Echo(vec![]);
        let input = "\n   \nhelp\nhello\nquit\nnever read\n";
        let mut out = Vec::new();
        run_repl(&mut backend, input.as_bytes(), &mut out, &ReplOptions { trace: false, prompt: false }).unwrap();
        assert_eq!(backend.0, vec!["hello"]);
        let out = String::from_utf8(out).unwrap();
        assert!(out.starts_with(GRAMMAR));
        assert!(out.ends_with("Sorry, I didn't understand that.\n"));
    }
}
