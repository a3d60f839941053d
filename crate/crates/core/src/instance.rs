//! Instance model: OR-Library job-shop parsing, structural validation, and
//! the embedded best-known-solution table for the Lawrence benchmark set.

use thiserror::Error;

use crate::Time;

/// One operation of a job: runs on `machine` for `duration` time units, at
/// position `step` of the job's technological sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operation {
    pub job: usize,
    pub step: usize,
    pub machine: usize,
    pub duration: Time,
}

/// A job-shop instance: `jobs` rows of `machines` operations each. Every job
/// visits every machine exactly once (the LA-family shape); the row order is
/// the technological sequence.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobShopInstance {
    name: String,
    jobs: usize,
    machines: usize,
    rows: Vec<Vec<Operation>>,
}

/// Structural defect in instance data, independent of any text encoding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one job and one machine")]
    Empty,
    #[error("job {job}: expected {expected} operations, found {found}")]
    WrongOperationCount {
        job: usize,
        expected: usize,
        found: usize,
    },
    #[error("job {job}: machine {machine} out of range (instance has {machines} machines)")]
    MachineOutOfRange {
        job: usize,
        machine: i64,
        machines: usize,
    },
    #[error("job {job}: machine {machine} appears more than once")]
    RepeatedMachine { job: usize, machine: usize },
    #[error("job {job}: duration {duration} is below 1")]
    BadDuration { job: usize, duration: Time },
}

/// Failure while reading the text format; every variant names the offending
/// 1-based source line.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header, expected \"<jobs> <machines>\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected {expected} whitespace-separated values ({pairs} machine/duration pairs), found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        pairs: usize,
        found: usize,
    },
    #[error("line {line}: {token:?} is not an integer")]
    BadToken { line: usize, token: String },
    #[error("line {line}: {source}")]
    InvalidRow { line: usize, source: InstanceError },
    #[error("expected {expected} job rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}: unexpected content after the last job row")]
    TrailingContent { line: usize },
}

impl JobShopInstance {
    /// Builds an instance from `(machine, duration)` rows, enforcing every
    /// structural invariant (row lengths, machine permutations, durations).
    pub fn from_rows(
        name: impl Into<String>,
        machines: usize,
        rows: Vec<Vec<(usize, Time)>>,
    ) -> Result<Self, InstanceError> {
        if rows.is_empty() || machines == 0 {
            return Err(InstanceError::Empty);
        }
        let jobs = rows.len();
        let mut table = Vec::with_capacity(jobs);
        for (job, row) in rows.into_iter().enumerate() {
            if row.len() != machines {
                return Err(InstanceError::WrongOperationCount {
                    job,
                    expected: machines,
                    found: row.len(),
                });
            }
            let mut seen = vec![false; machines];
            let mut ops = Vec::with_capacity(machines);
            for (step, (machine, duration)) in row.into_iter().enumerate() {
                if machine >= machines {
                    return Err(InstanceError::MachineOutOfRange {
                        job,
                        machine: machine as i64,
                        machines,
                    });
                }
                if seen[machine] {
                    return Err(InstanceError::RepeatedMachine { job, machine });
                }
                seen[machine] = true;
                if duration < 1 {
                    return Err(InstanceError::BadDuration { job, duration });
                }
                ops.push(Operation {
                    job,
                    step,
                    machine,
                    duration,
                });
            }
            table.push(ops);
        }
        Ok(Self {
            name: name.into(),
            jobs,
            machines,
            rows: table,
        })
    }

    /// Parses the standard job-shop text format: any number of blank or
    /// `#`-comment lines, a header `"<jobs> <machines>"`, then one line per
    /// job holding `machines` pairs `"machine duration"` with 0-based machine
    /// indices. Step indices are assigned by column position.
    pub fn parse(source: &str, name: impl Into<String>) -> Result<Self, ParseError> {
        let mut lines = source.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

        let (header_idx, header) = lines.next().ok_or(ParseError::MalformedHeader { line: 1 })?;
        let header_line = header_idx + 1;
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(ParseError::MalformedHeader { line: header_line });
        }
        let jobs: usize = dims[0]
            .parse()
            .map_err(|_| ParseError::MalformedHeader { line: header_line })?;
        let machines: usize = dims[1]
            .parse()
            .map_err(|_| ParseError::MalformedHeader { line: header_line })?;
        if jobs == 0 || machines == 0 {
            return Err(ParseError::MalformedHeader { line: header_line });
        }

        let mut rows: Vec<Vec<(usize, Time)>> = Vec::with_capacity(jobs);
        let mut row_lines = Vec::with_capacity(jobs);
        for _ in 0..jobs {
            let Some((idx, text)) = lines.next() else {
                return Err(ParseError::MissingRows {
                    expected: jobs,
                    found: rows.len(),
                });
            };
            let line = idx + 1;
            let mut values = Vec::with_capacity(2 * machines);
            for token in text.split_whitespace() {
                let value: i64 = token.parse().map_err(|_| ParseError::BadToken {
                    line,
                    token: token.to_string(),
                })?;
                values.push(value);
            }
            if values.len() != 2 * machines {
                return Err(ParseError::MalformedRow {
                    line,
                    expected: 2 * machines,
                    pairs: machines,
                    found: values.len(),
                });
            }
            let job = rows.len();
            let mut row = Vec::with_capacity(machines);
            for pair in values.chunks_exact(2) {
                let (machine, duration) = (pair[0], pair[1]);
                if machine < 0 {
                    return Err(ParseError::InvalidRow {
                        line,
                        source: InstanceError::MachineOutOfRange {
                            job,
                            machine,
                            machines,
                        },
                    });
                }
                row.push((machine as usize, duration));
            }
            rows.push(row);
            row_lines.push(line);
        }
        if let Some((idx, _)) = lines.next() {
            return Err(ParseError::TrailingContent { line: idx + 1 });
        }

        Self::from_rows(name, machines, rows).map_err(|source| {
            let line = match &source {
                InstanceError::WrongOperationCount { job, .. }
                | InstanceError::MachineOutOfRange { job, .. }
                | InstanceError::RepeatedMachine { job, .. }
                | InstanceError::BadDuration { job, .. } => row_lines[*job],
                InstanceError::Empty => header_line,
            };
            ParseError::InvalidRow { line, source }
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    /// Total operation count `jobs × machines`.
    pub fn num_operations(&self) -> usize {
        self.jobs * self.machines
    }

    /// The technological sequence of one job.
    pub fn row(&self, job: usize) -> &[Operation] {
        &self.rows[job]
    }

    pub fn operation(&self, job: usize, step: usize) -> &Operation {
        &self.rows[job][step]
    }

    /// All operations in job-major order.
    pub fn operations(&self) -> impl Iterator<Item = &Operation> {
        self.rows.iter().flatten()
    }

    /// Dense index of an operation, `job * machines + step`.
    pub fn op_index(&self, job: usize, step: usize) -> usize {
        job * self.machines + step
    }

    /// Total processing time assigned to each machine.
    pub fn machine_loads(&self) -> Vec<Time> {
        let mut loads = vec![0; self.machines];
        for op in self.operations() {
            loads[op.machine] += op.duration;
        }
        loads
    }

    /// Total processing time of each job.
    pub fn job_durations(&self) -> Vec<Time> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|op| op.duration).sum())
            .collect()
    }

    /// A simple makespan lower bound: the larger of the heaviest machine load
    /// and the longest job.
    pub fn lower_bound(&self) -> Time {
        let machine = self.machine_loads().into_iter().max().unwrap_or(0);
        let job = self.job_durations().into_iter().max().unwrap_or(0);
        machine.max(job)
    }

    /// log10 of the sequence-space size `(jobs!)^machines`, computed as
    /// `machines × Σ log10(k)` so the factorial is never materialized.
    pub fn search_space_log10(&self) -> f64 {
        let log_factorial: f64 = (2..=self.jobs).map(|k| (k as f64).log10()).sum();
        self.machines as f64 * log_factorial
    }

    /// Serializes back to the text format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.jobs, self.machines);
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|op| format!("{} {}", op.machine, op.duration))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// One row of the embedded best-known-solution table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BksRecord {
    pub name: &'static str,
    pub jobs: usize,
    pub machines: usize,
    pub bks: Time,
}

const fn bks(name: &'static str, jobs: usize, machines: usize, bks: Time) -> BksRecord {
    BksRecord {
        name,
        jobs,
        machines,
        bks,
    }
}

/// Best-known makespans for the 40 Lawrence instances, as used by the
/// benchmark reports. Embedded at compile time; never fetched.
pub const BKS_TABLE: [BksRecord; 40] = [
    bks("LA01", 10, 5, 666),
    bks("LA02", 10, 5, 655),
    bks("LA03", 10, 5, 597),
    bks("LA04", 10, 5, 590),
    bks("LA05", 10, 5, 593),
    bks("LA06", 15, 5, 926),
    bks("LA07", 15, 5, 890),
    bks("LA08", 15, 5, 863),
    bks("LA09", 15, 5, 951),
    bks("LA10", 15, 5, 958),
    bks("LA11", 20, 5, 1222),
    bks("LA12", 20, 5, 1039),
    bks("LA13", 20, 5, 1150),
    bks("LA14", 20, 5, 1292),
    bks("LA15", 20, 5, 1207),
    bks("LA16", 10, 10, 945),
    bks("LA17", 10, 10, 784),
    bks("LA18", 10, 10, 848),
    bks("LA19", 10, 10, 842),
    bks("LA20", 10, 10, 902),
    bks("LA21", 15, 10, 1046),
    bks("LA22", 15, 10, 927),
    bks("LA23", 15, 10, 1032),
    bks("LA24", 15, 10, 935),
    bks("LA25", 15, 10, 977),
    bks("LA26", 20, 10, 1218),
    bks("LA27", 20, 10, 1235),
    bks("LA28", 20, 10, 1216),
    bks("LA29", 20, 10, 1157),
    bks("LA30", 20, 10, 1355),
    bks("LA31", 30, 10, 1784),
    bks("LA32", 30, 10, 1850),
    bks("LA33", 30, 10, 1719),
    bks("LA34", 30, 10, 1721),
    bks("LA35", 30, 10, 1888),
    bks("LA36", 15, 15, 1268),
    bks("LA37", 15, 15, 1397),
    bks("LA38", 15, 15, 1196),
    bks("LA39", 15, 15, 1233),
    bks("LA40", 15, 15, 1222),
];

/// Lookup failure for [`lookup_bks`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no best-known solution recorded for instance {0:?}")]
pub struct UnknownInstance(pub String);

/// Returns the best-known makespan for a Lawrence instance name
/// (case-insensitive, `LA01`…`LA40`).
pub fn lookup_bks(name: &str) -> Result<Time, UnknownInstance> {
    let needle = name.to_ascii_uppercase();
    BKS_TABLE
        .iter()
        .find(|r| r.name == needle)
        .map(|r| r.bks)
        .ok_or_else(|| UnknownInstance(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // The 3x3 demonstration instance, machine labels re-indexed to 0-based.
    const DEMO: &str = "# 3x3 demonstration instance\n3 3\n2 4 1 3 0 3\n1 1 2 2 0 4\n1 3 0 2 2 3\n";

    #[test]
    fn parses_demo_with_comments() {
        let inst = JobShopInstance::parse(DEMO, "3x3").unwrap();
        assert_eq!(inst.jobs(), 3);
        assert_eq!(inst.machines(), 3);
        assert_eq!(inst.num_operations(), 9);
        let first = inst.operation(0, 0);
        assert_eq!((first.machine, first.duration), (2, 4));
        assert_eq!(inst.operation(1, 0).duration, 1);
        assert_eq!(inst.operation(2, 2).machine, 2);
    }

    #[test]
    fn parses_minimal_instance() {
        let inst = JobShopInstance::parse("1 1\n0 5\n", "tiny").unwrap();
        assert_eq!(inst.num_operations(), 1);
        assert_eq!(inst.operation(0, 0).duration, 5);
    }

    #[test]
    fn short_row_names_the_line() {
        let err = JobShopInstance::parse("10 5\n0 1 1 1 2 1 3 1\n", "x").unwrap_err();
        assert_eq!(
            err,
            ParseError::MalformedRow {
                line: 2,
                expected: 10,
                pairs: 5,
                found: 8
            }
        );
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(matches!(
            JobShopInstance::parse("", "x"),
            Err(ParseError::MalformedHeader { .. })
        ));
        assert!(matches!(
            JobShopInstance::parse("2 two\n", "x"),
            Err(ParseError::MalformedHeader { line: 1 })
        ));
        assert!(matches!(
            JobShopInstance::parse("1 2\n0 5 0 6\n", "x"),
            Err(ParseError::InvalidRow {
                line: 2,
                source: InstanceError::RepeatedMachine { job: 0, machine: 0 }
            })
        ));
        assert!(matches!(
            JobShopInstance::parse("1 1\n0 0\n", "x"),
            Err(ParseError::InvalidRow {
                line: 2,
                source: InstanceError::BadDuration { .. }
            })
        ));
        assert!(matches!(
            JobShopInstance::parse("1 1\n3 5\n", "x"),
            Err(ParseError::InvalidRow {
                line: 2,
                source: InstanceError::MachineOutOfRange { machine: 3, .. }
            })
        ));
        assert!(matches!(
            JobShopInstance::parse("2 1\n0 5\n", "x"),
            Err(ParseError::MissingRows {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            JobShopInstance::parse("1 1\n0 5\n0 6\n", "x"),
            Err(ParseError::TrailingContent { line: 3 })
        ));
        assert!(matches!(
            JobShopInstance::parse("1 1\n0 5x\n", "x"),
            Err(ParseError::BadToken { line: 2, .. })
        ));
    }

    #[test]
    fn loads_and_bounds_on_demo() {
        let inst = JobShopInstance::parse(DEMO, "3x3").unwrap();
        assert_eq!(inst.machine_loads(), vec![9, 7, 9]);
        assert_eq!(inst.job_durations(), vec![10, 7, 8]);
        assert_eq!(inst.lower_bound(), 10);
    }

    #[test]
    fn search_space_examples() {
        let ten_by_five = JobShopInstance::from_rows(
            "g",
            5,
            (0..10)
                .map(|_| (0..5).map(|m| (m, 1)).collect())
                .collect(),
        )
        .unwrap();
        // 5 * log10(10!) = 5 * log10(3628800)
        assert!((ten_by_five.search_space_log10() - 32.7988).abs() < 5e-3);

        let one_by_one = JobShopInstance::parse("1 1\n0 5\n", "t").unwrap();
        assert_eq!(one_by_one.search_space_log10(), 0.0);

        // The printed figure next to this formula in the source material is
        // inconsistent with the formula itself; the formula is authoritative.
        let thirty_by_ten = JobShopInstance::from_rows(
            "g",
            10,
            (0..30)
                .map(|_| (0..10).map(|m| (m, 1)).collect())
                .collect(),
        )
        .unwrap();
        assert!((thirty_by_ten.search_space_log10() - 324.236).abs() < 5e-2);
    }

    #[test]
    fn search_space_monotone_in_jobs_and_machines() {
        let space = |n: usize, m: usize| {
            JobShopInstance::from_rows(
                "g",
                m,
                (0..n).map(|_| (0..m).map(|k| (k, 1)).collect()).collect(),
            )
            .unwrap()
            .search_space_log10()
        };
        for n in 2..8 {
            for m in 2..8 {
                assert!(space(n + 1, m) > space(n, m));
                assert!(space(n, m + 1) > space(n, m));
            }
        }
    }

    #[test]
    fn bks_lookup_examples() {
        assert_eq!(lookup_bks("LA01"), Ok(666));
        assert_eq!(lookup_bks("la29"), Ok(1157));
        assert!(lookup_bks("LA99").is_err());
    }

    #[test]
    fn bks_table_matches_reference_transcription() {
        // Independent transcription of the published best-known values, in
        // LA01..LA40 order, against which the embedded table is checked.
        const EXPECTED: [Time; 40] = [
            666, 655, 597, 590, 593, 926, 890, 863, 951, 958, 1222, 1039, 1150, 1292, 1207, 945,
            784, 848, 842, 902, 1046, 927, 1032, 935, 977, 1218, 1235, 1216, 1157, 1355, 1784,
            1850, 1719, 1721, 1888, 1268, 1397, 1196, 1233, 1222,
        ];
        assert_eq!(BKS_TABLE.len(), 40);
        for (i, (record, expected)) in BKS_TABLE.iter().zip(EXPECTED).enumerate() {
            assert_eq!(record.name, format!("LA{:02}", i + 1));
            assert_eq!(
                record.bks, expected,
                "{} best-known value drifted",
                record.name
            );
            assert!(record.bks >= 1);
            assert_eq!(lookup_bks(record.name), Ok(expected));
        }
    }

    fn instance_strategy() -> impl Strategy<Value = JobShopInstance> {
        (1usize..=5, 1usize..=4).prop_flat_map(|(n, m)| {
            let row = (
                Just((0..m).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec(1i64..=99, m),
            );
            prop::collection::vec(row, n).prop_map(move |rows| {
                let rows = rows
                    .into_iter()
                    .map(|(ms, ds)| ms.into_iter().zip(ds).collect())
                    .collect();
                JobShopInstance::from_rows("fuzz", m, rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(inst in instance_strategy()) {
            let text = inst.to_text();
            let back = JobShopInstance::parse(&text, inst.name()).unwrap();
            prop_assert_eq!(&back, &inst);
        }
    }
}
