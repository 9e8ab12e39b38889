//! Resolution of the --body argument: a JSON spec file when the value names
//! an existing file, otherwise one of the builtin kinds.

use std::path::Path;

use gauss_convex::bodies::BodySpec;
use gauss_convex::ConvexBody;

pub struct BodyRequest<'a> {
    pub body: &'a str,
    pub dim: Option<usize>,
    pub r: Option<f64>,
    pub c: Option<f64>,
}

impl crate::BodyArgs {
    fn request(&self) -> BodyRequest<'_> {
        BodyRequest {
            body: &self.body,
            dim: self.dim,
            r: self.r,
            c: self.c,
        }
    }
}

pub fn resolve_body(args: &crate::BodyArgs) -> Result<ConvexBody, String> {
    build(&args.request())
}

fn build(req: &BodyRequest<'_>) -> Result<ConvexBody, String> {
    let path = Path::new(req.body);
    if path.is_file() {
        let spec = BodySpec::from_file(path).map_err(|e| e.to_string())?;
        return spec.build().map_err(|e| e.to_string());
    }
    let dim = || {
        req.dim
            .ok_or_else(|| format!("--dim is required for builtin body `{}`", req.body))
    };
    match req.body {
        "slab" => {
            let n = dim()?;
            let c = req.c.unwrap_or(1.0);
            let mut v = vec![0.0; n];
            if n == 0 {
                return Err("--dim must be positive".into());
            }
            v[0] = 1.0;
            ConvexBody::slab(&v, c, n).map_err(|e| e.to_string())
        }
        "ball" => {
            let n = dim()?;
            let r = req
                .r
                .ok_or_else(|| "--r is required for the builtin ball".to_string())?;
            ConvexBody::ball(r, n).map_err(|e| e.to_string())
        }
        "cube" => {
            let n = dim()?;
            let r = req
                .r
                .ok_or_else(|| "--r is required for the builtin cube".to_string())?;
            ConvexBody::cube(r, n).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "`{other}` is neither a spec file nor a builtin kind (slab | ball | cube)"
        )),
    }
}
