//! Round trips through the CSV and raw snapshot formats.

use muskat::io::{read_csv, read_raw, write_csv, write_raw};
use muskat::Grid;

fn main() -> muskat::Result<()> {
    let g = Grid::new(8.0, 32)?;
    let f = g.sample(|x| (-(x * x)).exp());

    let mut csv = Vec::new();
    write_csv(&f, &mut csv)?;
    let back = read_csv(csv.as_slice())?;
    println!("csv: {} bytes, max diff {:.1e}", csv.len(), back.axpy(-1.0, &f)?.sup_norm());
    print!("{}", String::from_utf8_lossy(&csv).lines().take(3).collect::<Vec<_>>().join("\n"));
    println!("\n...");

    let mut raw = Vec::new();
    write_raw(&f, &mut raw)?;
    let back = read_raw(raw.as_slice())?;
    println!("raw: {} bytes, bit-exact {}", raw.len(), back.values() == f.values());
    Ok(())
}
