//! Builds a small result grid by hand and renders it in every table format.
use persona_audit::analysis::{Cell, Grid, Study, StudyResult};
use persona_audit::report::{display_tables, TableFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows: Vec<String> = ["Gender", "Political Ideology"].map(String::from).to_vec();
    let columns = vec!["Explicit Offensive".to_string(), "Explicit Stigmatizing".to_string()];
    let cells = vec![
        Cell::tested("Gender", "Explicit Offensive", 0.41, 1e-5, 641),
        Cell::tested("Gender", "Explicit Stigmatizing", 0.03, 0.71, 641),
        Cell::tested("Political Ideology", "Explicit Offensive", -4.58, 1e-40, 641),
        Cell::tested("Political Ideology", "Explicit Stigmatizing", -0.62, 1e-4, 641),
    ];
    let mut grid = Grid::new("annotation", rows, columns, cells);
    grid.apply_bh(0.05)?;

    let mut result = StudyResult::new(Study::Annotation, "example", 0.05, 0);
    result.grids.push(grid);
    for table in display_tables(&result) {
        for format in [TableFormat::Markdown, TableFormat::Csv, TableFormat::Json] {
            println!("--- {} ({format})", table.name);
            print!("{}", table.render(format)?);
        }
    }
    Ok(())
}
