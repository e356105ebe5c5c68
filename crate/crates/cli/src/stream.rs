//! Line-by-line record processing with bounded memory.
//!
//! Records are read, transformed, and written in input order. With more
//! than one thread, fixed-size batches are processed on a rayon pool and
//! written back in order, so the output is identical regardless of the
//! thread count.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use editalign::corpus::{parse_record_line, record_to_line, PatentRecord};

const BATCH_LINES: usize = 64;

/// Applies `transform` to every record of `input` and writes the results to
/// `output` in input order; `observe` sees each record on the writer thread
/// in that same order. Returns the number of records written.
pub fn process_records<T, F>(
    input: &Path,
    output: &Path,
    threads: usize,
    transform: T,
    mut observe: F,
) -> Result<usize>
where
    T: Fn(PatentRecord) -> Result<PatentRecord> + Sync,
    F: FnMut(&PatentRecord),
{
    let reader = BufReader::new(
        File::open(input).with_context(|| format!("cannot open {}", input.display()))?,
    );
    let mut writer = BufWriter::new(
        File::create(output).with_context(|| format!("cannot create {}", output.display()))?,
    );
    let pool = (threads > 1)
        .then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("cannot build worker pool")
        })
        .transpose()?;

    let process_line = |(line_no, line): &(usize, String)| -> Result<PatentRecord> {
        let record = parse_record_line(line, *line_no)?;
        transform(record).with_context(|| format!("line {line_no}"))
    };

    let mut written = 0usize;
    let mut lines = reader.lines().enumerate();
    loop {
        let mut batch = Vec::with_capacity(BATCH_LINES);
        for (idx, line) in lines.by_ref() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            batch.push((idx + 1, line));
            if batch.len() == BATCH_LINES {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Result<PatentRecord>> = match &pool {
            Some(pool) => pool.install(|| {
                use rayon::prelude::*;
                batch.par_iter().map(process_line).collect()
            }),
            None => batch.iter().map(process_line).collect(),
        };
        for result in results {
            let record = result?;
            observe(&record);
            writeln!(writer, "{}", record_to_line(&record)?)?;
            written += 1;
        }
    }
    writer.flush()?;
    Ok(written)
}
