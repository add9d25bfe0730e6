//! Recompute every published reference table and summarise the agreement.

use seqrac::cli::tables::{check_tables, Status, Summary, TableId};

fn main() -> seqrac::Result<()> {
    for table in TableId::ALL {
        let checks = check_tables(&[table], None)?;
        let s = Summary::of(&checks);
        println!(
            "table {:>4}: {:3} pass {:2} fail {:3} info {:2} excluded",
            table.name(),
            s.pass,
            s.fail,
            s.info,
            s.excluded
        );
        for c in checks.iter().filter(|c| c.status == Status::Fail) {
            println!(
                "      theta={} {}: printed {} computed {:.4}",
                c.theta_deg, c.column, c.printed, c.computed
            );
        }
    }
    Ok(())
}
