//! Interactive prompt. Statements may span lines and end with `;`.
//! Meta-commands: `:quit`, `:load FILE`, `:export FILE`.

use std::io::{self, BufRead, IsTerminal, Write};

use grafion_core::engine::Engine;
use grafion_core::query::{ExecContext, Params};

use crate::failure::Failure;
use crate::graph_file::GraphFile;
use crate::render;

pub fn run(file: GraphFile, ctx: ExecContext) -> Result<(), Failure> {
    let engine = Engine::new(file.load_or_empty()?, ctx);
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout();
    let mut buffer = String::new();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("{}", if buffer.is_empty() { "grafion> " } else { "     ...> " });
            out.flush().map_err(Failure::internal)?;
        }
        let Some(line) = lines.next() else { break };
        let line = line.map_err(Failure::internal)?;
        let trimmed = line.trim();
        if buffer.is_empty() {
            if trimmed.is_empty() {
                continue;
            }
            if let Some(meta) = trimmed.strip_prefix(':') {
                match meta_command(meta, &file, &engine) {
                    Ok(true) => break,
                    Ok(false) => {}
                    Err(f) => eprintln!("{f}"),
                }
                continue;
            }
        }
        buffer.push_str(&line);
        buffer.push('\n');
        if trimmed.ends_with(';') {
            match engine.run(&buffer, &Params::new()) {
                Ok(rs) => print!("{}", render::rowset(&rs)),
                Err(e) => eprintln!("{}", Failure::query(&buffer, e)),
            }
            buffer.clear();
        }
    }
    if !buffer.trim().is_empty() {
        eprintln!("error: unterminated statement discarded (statements end with ';')");
    }
    Ok(())
}

/// Returns true when the session should end.
fn meta_command(meta: &str, file: &GraphFile, engine: &Engine) -> Result<bool, Failure> {
    let (cmd, arg) = meta.split_once(char::is_whitespace).map_or((meta, ""), |(c, a)| (c, a.trim()));
    match (cmd, arg) {
        ("quit" | "exit", _) => Ok(true),
        ("load", path) if !path.is_empty() => {
            let g = file.read(path.as_ref())?;
            let (n, e) = (g.node_count(), g.edge_count());
            engine.write(|current| *current = g);
            println!("loaded {n} nodes and {e} relationships");
            Ok(false)
        }
        ("export", path) if !path.is_empty() => {
            engine.read(|g| file.write(path.as_ref(), g))?;
            println!("exported to {path}");
            Ok(false)
        }
        ("load" | "export", _) => Err(Failure::user(format!(":{cmd} needs a file name"))),
        _ => Err(Failure::user(format!("unknown command :{cmd} (try :quit, :load FILE, :export FILE)"))),
    }
}
