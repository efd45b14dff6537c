//! Refines a rule and writes an SVG of the cell decomposition.
//!
//!     cargo run --example refine_svg -- barycentric 2 out.svg

use thurston_ergopt::subdivision::{load_rule, refine, render_svg, SvgOptions};

fn main() -> thurston_ergopt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("pillow_lattes", String::as_str);
    let level: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let path = args.get(2).map_or("refine.svg", String::as_str);

    let rule = load_rule(name)?;
    let d = refine(&rule, level)?;
    println!(
        "{} level {level}: {} tiles, {} edges, {} vertices",
        rule.name,
        d.tiles.len(),
        d.edges.len(),
        d.vertices.len()
    );
    std::fs::write(path, render_svg(&rule, &d, &SvgOptions::default()))?;
    println!("wrote {path}");
    Ok(())
}
