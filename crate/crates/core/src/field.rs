//! Per-direction complex antenna responses and their CSV representation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{DirectionGrid, GridSpec};

/// Module identifier (1-based, as in the grip tables).
pub type ModuleId = u8;

/// Complex response row-vectors `M_i` for every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseField {
    grid: GridSpec,
    module_of: Vec<ModuleId>,
    // row-major: point i, element k at i * n_elements + k
    responses: Vec<Complex64>,
    label: String,
}

impl ResponseField {
    pub fn new(
        grid: GridSpec,
        module_of: Vec<ModuleId>,
        responses: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let nt = module_of.len();
        if nt == 0 {
            return Err(Error::param("field needs at least one element"));
        }
        if let Some(&bad) = module_of.iter().find(|&&m| m == 0) {
            return Err(Error::param(format!("module id {bad} out of range")));
        }
        if responses.len() != grid.n_points * nt {
            return Err(Error::shape(format!(
                "{} responses for {} points x {} elements",
                responses.len(),
                grid.n_points,
                nt
            )));
        }
        if responses.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite response value".into()));
        }
        Ok(ResponseField {
            grid,
            module_of,
            responses,
            label: label.into(),
        })
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid
    }

    pub fn n_elements(&self) -> usize {
        self.module_of.len()
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points
    }

    pub fn module_of(&self) -> &[ModuleId] {
        &self.module_of
    }

    /// Distinct module ids in ascending order.
    pub fn modules(&self) -> Vec<ModuleId> {
        let mut m = self.module_of.clone();
        m.sort_unstable();
        m.dedup();
        m
    }

    /// Element indices belonging to `module`, ascending.
    pub fn elements_of(&self, module: ModuleId) -> Vec<usize> {
        self.module_of
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == module)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Response vector at point `i`.
    pub fn row(&self, i: usize) -> &[Complex64] {
        let nt = self.n_elements();
        &self.responses[i * nt..(i + 1) * nt]
    }

    pub fn responses(&self) -> &[Complex64] {
        &self.responses
    }

    pub fn is_defined_on(&self, grid: &DirectionGrid) -> bool {
        self.grid == grid.spec()
    }

    /// Errors unless both fields share grid and element layout.
    pub fn check_compatible(&self, other: &ResponseField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::shape(format!(
                "field {:?} is on grid {} but {:?} is on {}",
                self.label, self.grid, other.label, other.grid
            )));
        }
        if self.module_of != other.module_of {
            return Err(Error::shape(format!(
                "fields {:?} and {:?} have different element layouts",
                self.label, other.label
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self, grid: &DirectionGrid) -> Result<String> {
        if !self.is_defined_on(grid) {
            return Err(Error::shape(format!(
                "field is on {} but grid is {}",
                self.grid,
                grid.spec()
            )));
        }
        let nt = self.n_elements();
        let mut out = String::with_capacity(self.n_points() * (nt * 48 + 48));
        let modules: Vec<String> = self.module_of.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "#nt={nt}");
        let _ = writeln!(out, "#modules={}", modules.join(","));
        let _ = writeln!(out, "#label={}", self.label);
        let _ = writeln!(out, "#grid={}", self.grid);
        for i in 0..self.n_points() {
            let _ = write!(out, "{:.16e},{:.16e}", grid.theta()[i], grid.phi()[i]);
            for z in self.row(i) {
                let _ = write!(out, ",{:.16e},{:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn save(&self, grid: &DirectionGrid, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv(grid)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(ResponseField, DirectionGrid)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, &path.display().to_string())
    }

    /// Parses the CSV format written by [`ResponseField::to_csv`]. The grid
    /// is rebuilt from the `#grid=` header and every row's coordinates must
    /// match it bit-exactly.
    pub fn from_csv(text: &str, source: &str) -> Result<(ResponseField, DirectionGrid)> {
        let perr = |line: usize, column: usize, message: String| Error::Parse {
            file: source.to_string(),
            line,
            column,
            message,
        };
        let mut nt: Option<usize> = None;
        let mut module_of: Option<Vec<ModuleId>> = None;
        let mut label: Option<String> = None;
        let mut grid: Option<DirectionGrid> = None;
        let mut responses = Vec::new();
        let mut row = 0usize;

        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let (key, value) = header
                    .split_once('=')
                    .ok_or_else(|| perr(lineno, 2, "header must be #key=value".into()))?;
                let vcol = key.len() + 3;
                match key {
                    "nt" => {
                        nt = Some(value.parse().map_err(|_| {
                            perr(lineno, vcol, format!("bad element count {value:?}"))
                        })?)
                    }
                    "modules" => {
                        let mut ids = Vec::new();
                        let mut col = vcol;
                        for tok in value.split(',') {
                            ids.push(tok.trim().parse().map_err(|_| {
                                perr(lineno, col, format!("bad module id {tok:?}"))
                            })?);
                            col += tok.len() + 1;
                        }
                        module_of = Some(ids);
                    }
                    "label" => label = Some(value.to_string()),
                    "grid" => {
                        let spec: GridSpec = value
                            .parse()
                            .map_err(|e: Error| perr(lineno, vcol, e.to_string()))?;
                        grid = Some(spec.build().map_err(|e| perr(lineno, vcol, e.to_string()))?);
                    }
                    other => return Err(perr(lineno, 2, format!("unknown header {other:?}"))),
                }
                continue;
            }

            let (Some(nt), Some(grid)) = (nt, grid.as_ref()) else {
                return Err(perr(lineno, 1, "data row before #nt and #grid headers".into()));
            };
            if row >= grid.len() {
                return Err(perr(lineno, 1, format!("more rows than the {} grid points", grid.len())));
            }
            let mut values = Vec::with_capacity(2 + 2 * nt);
            let mut col = 1;
            for tok in line.split(',') {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| perr(lineno, col, format!("bad number {tok:?}")))?;
                values.push((v, col));
                col += tok.len() + 1;
            }
            if values.len() != 2 + 2 * nt {
                return Err(perr(
                    lineno,
                    1,
                    format!("expected {} columns, found {}", 2 + 2 * nt, values.len()),
                ));
            }
            if values[0].0.to_bits() != grid.theta()[row].to_bits()
                || values[1].0.to_bits() != grid.phi()[row].to_bits()
            {
                return Err(perr(lineno, 1, format!("coordinates do not match grid point {row}")));
            }
            for pair in values[2..].chunks_exact(2) {
                responses.push(Complex64::new(pair[0].0, pair[1].0));
            }
            row += 1;
        }

        let end = text.lines().count();
        let nt = nt.ok_or_else(|| perr(end, 1, "missing #nt header".into()))?;
        let module_of = module_of.ok_or_else(|| perr(end, 1, "missing #modules header".into()))?;
        let grid = grid.ok_or_else(|| perr(end, 1, "missing #grid header".into()))?;
        if module_of.len() != nt {
            return Err(perr(end, 1, format!("#modules lists {} ids but #nt={nt}", module_of.len())));
        }
        if row != grid.len() {
            return Err(perr(end, 1, format!("found {row} rows, grid has {} points", grid.len())));
        }
        let field = ResponseField::new(grid.spec(), module_of, responses, label.unwrap_or_default())?;
        Ok((field, grid))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_direction_grid;

    fn toy() -> (ResponseField, DirectionGrid) {
        let grid = make_direction_grid(7, 100.0).unwrap();
        let responses = (0..14)
            .map(|k| Complex64::new(0.1 * k as f64 + 1.0 / 3.0, -(k as f64).sqrt()))
            .collect();
        let f = ResponseField::new(grid.spec(), vec![1, 2], responses, "free").unwrap();
        (f, grid)
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let (f, grid) = toy();
        let text = f.to_csv(&grid).unwrap();
        assert!(text.starts_with("#nt=2\n#modules=1,2\n#label=free\n#grid=fib:7:100\n"));
        let (g, grid2) = ResponseField::from_csv(&text, "toy").unwrap();
        assert_eq!(f, g);
        assert_eq!(grid, grid2);
        assert_eq!(g.to_csv(&grid2).unwrap(), text);
    }

    #[test]
    fn parse_errors_carry_position() {
        let (f, grid) = toy();
        let text = f.to_csv(&grid).unwrap().replacen(",-0.0", ",zz", 1);
        match ResponseField::from_csv(&text, "x.csv") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 5);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
        let truncated: String = f.to_csv(&grid).unwrap().lines().take(8).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            ResponseField::from_csv(&truncated, "t"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn constructor_validates_shape() {
        let grid = make_direction_grid(3, 90.0).unwrap();
        assert!(matches!(
            ResponseField::new(grid.spec(), vec![1], vec![Complex64::new(1.0, 0.0); 2], "x"),
            Err(Error::Shape(_))
        ));
        assert!(ResponseField::new(grid.spec(), vec![0], vec![Complex64::new(1.0, 0.0); 3], "x").is_err());
        assert!(ResponseField::new(
            grid.spec(),
            vec![1],
            vec![Complex64::new(f64::NAN, 0.0); 3],
            "x"
        )
        .is_err());
    }
}
