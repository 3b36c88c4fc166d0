// Generated by tools/derive_catalog.py; do not edit by hand.

pub(crate) const RECORDS: &[TruthRecord] = &[
    TruthRecord {
        name: "euclidean2",
        chart: "cartesian",
        notes: "flat plane",
        dim: 2,
        cometric: &[&["1", "0"], &["0", "1"]],
        drift: &["0", "0"],
        metric: &[&["1", "0"], &["0", "1"]],
        log_rho: "0",
        christoffels: &["0", "0", "0", "0", "0", "0", "0", "0"],
        ricci: &[&["0", "0"], &["0", "0"]],
        ricci_mu: &[&["0", "0"], &["0", "0"]],
        box_lo: &[-2.0, -2.0],
        box_hi: &[2.0, 2.0],
    },
    TruthRecord {
        name: "euclidean3",
        chart: "cartesian",
        notes: "flat space",
        dim: 3,
        cometric: &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]],
        drift: &["0", "0", "0"],
        metric: &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]],
        log_rho: "0",
        christoffels: &["0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
        ricci: &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]],
        ricci_mu: &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]],
        box_lo: &[-2.0, -2.0, -2.0],
        box_hi: &[2.0, 2.0, 2.0],
    },
    TruthRecord {
        name: "sphere2_spherical",
        chart: "spherical",
        notes: "unit sphere, polar angle x1 and azimuth x2",
        dim: 2,
        cometric: &[&["1", "0"], &["0", "sin(x1)^(-2)"]],
        drift: &["cos(x1)/sin(x1)", "0"],
        metric: &[&["1", "0"], &["0", "sin(x1)^2"]],
        log_rho: "0",
        christoffels: &["0", "0", "0", "-sin(2*x1)/2", "0", "cos(x1)/sin(x1)", "cos(x1)/sin(x1)", "0"],
        ricci: &[&["1", "0"], &["0", "-cos(2*x1) + sin(2*x1)*cos(x1)/(2*sin(x1))"]],
        ricci_mu: &[&["1", "0"], &["0", "-cos(2*x1) + sin(2*x1)*cos(x1)/(2*sin(x1))"]],
        box_lo: &[0.2, -3.141592653589793],
        box_hi: &[2.941592653589793, 3.141592653589793],
    },
    TruthRecord {
        name: "sphere2_stereographic",
        chart: "stereographic",
        notes: "unit sphere, stereographic projection from the north pole",
        dim: 2,
        cometric: &[&["x1^4/4 + x1^2*x2^2/2 + x1^2/2 + x2^4/4 + x2^2/2 + 1/4", "0"], &["0", "x1^4/4 + x1^2*x2^2/2 + x1^2/2 + x2^4/4 + x2^2/2 + 1/4"]],
        drift: &["0", "0"],
        metric: &[&["4/(x1^2 + x2^2 + 1)^2", "0"], &["0", "4/(x1^2 + x2^2 + 1)^2"]],
        log_rho: "0",
        christoffels: &["-2*x1/(x1^2 + x2^2 + 1)", "-2*x2/(x1^2 + x2^2 + 1)", "-2*x2/(x1^2 + x2^2 + 1)", "2*x1/(x1^2 + x2^2 + 1)", "2*x2/(x1^2 + x2^2 + 1)", "-2*x1/(x1^2 + x2^2 + 1)", "-2*x1/(x1^2 + x2^2 + 1)", "-2*x2/(x1^2 + x2^2 + 1)"],
        ricci: &[&["4/(x1^2 + x2^2 + 1)^2", "0"], &["0", "4/(x1^2 + x2^2 + 1)^2"]],
        ricci_mu: &[&["4/(x1^2 + x2^2 + 1)^2", "0"], &["0", "4/(x1^2 + x2^2 + 1)^2"]],
        box_lo: &[-2.0, -2.0],
        box_hi: &[2.0, 2.0],
    },
    TruthRecord {
        name: "hyperbolic_halfplane",
        chart: "upper_halfplane",
        notes: "hyperbolic plane, curvature -1",
        dim: 2,
        cometric: &[&["x2^2", "0"], &["0", "x2^2"]],
        drift: &["0", "0"],
        metric: &[&["x2^(-2)", "0"], &["0", "x2^(-2)"]],
        log_rho: "0",
        christoffels: &["0", "-1/x2", "-1/x2", "0", "1/x2", "0", "0", "-1/x2"],
        ricci: &[&["-1/x2^2", "0"], &["0", "-1/x2^2"]],
        ricci_mu: &[&["-1/x2^2", "0"], &["0", "-1/x2^2"]],
        box_lo: &[-2.0, 0.5],
        box_hi: &[2.0, 4.0],
    },
    TruthRecord {
        name: "ou_gaussian1",
        chart: "cartesian",
        notes: "Ornstein-Uhlenbeck, standard Gaussian",
        dim: 1,
        cometric: &[&["1"]],
        drift: &["-x1"],
        metric: &[&["1"]],
        log_rho: "-x1^2/2",
        christoffels: &["0"],
        ricci: &[&["0"]],
        ricci_mu: &[&["1"]],
        box_lo: &[-3.0],
        box_hi: &[3.0],
    },
    TruthRecord {
        name: "ou_gaussian2",
        chart: "cartesian",
        notes: "Ornstein-Uhlenbeck, standard Gaussian",
        dim: 2,
        cometric: &[&["1", "0"], &["0", "1"]],
        drift: &["-x1", "-x2"],
        metric: &[&["1", "0"], &["0", "1"]],
        log_rho: "-x1^2/2 - x2^2/2",
        christoffels: &["0", "0", "0", "0", "0", "0", "0", "0"],
        ricci: &[&["0", "0"], &["0", "0"]],
        ricci_mu: &[&["1", "0"], &["0", "1"]],
        box_lo: &[-3.0, -3.0],
        box_hi: &[3.0, 3.0],
    },
    TruthRecord {
        name: "torus_conformal",
        chart: "periodic",
        notes: "flat torus with conformal factor exp(0.6 sin x1 cos x2) and a density",
        dim: 2,
        cometric: &[&["exp(-3*sin(x1)*cos(x2)/5)", "0"], &["0", "exp(-3*sin(x1)*cos(x2)/5)"]],
        drift: &["-exp(-3*sin(x1)*cos(x2)/5)*sin(x1)/2", "3*exp(-3*sin(x1)*cos(x2)/5)*cos(x2)/10"],
        metric: &[&["exp(3*sin(x1)*cos(x2)/5)", "0"], &["0", "exp(3*sin(x1)*cos(x2)/5)"]],
        log_rho: "3*sin(x2)/10 + cos(x1)/2",
        christoffels: &["3*cos(x1)*cos(x2)/10", "-3*sin(x1)*sin(x2)/10", "-3*sin(x1)*sin(x2)/10", "-3*cos(x1)*cos(x2)/10", "3*sin(x1)*sin(x2)/10", "3*cos(x1)*cos(x2)/10", "3*cos(x1)*cos(x2)/10", "-3*sin(x1)*sin(x2)/10"],
        ricci: &[&["3*sin(x1)*cos(x2)/5", "0"], &["0", "3*sin(x1)*cos(x2)/5"]],
        ricci_mu: &[&["3*sin(x1)*cos(x2)/5 - 3*sin(2*x1 - x2)/80 - 3*sin(2*x1 + x2)/80 + cos(x1)/2 + 9*cos(x1 - 2*x2)/400 - 9*cos(x1 + 2*x2)/400", "3*sin(x1)^2*sin(x2)/20 + 9*cos(x1)*cos(x2)^2/100"], &["3*sin(x1)^2*sin(x2)/20 + 9*cos(x1)*cos(x2)^2/100", "3*sin(x1)*cos(x2)/5 + 3*sin(x2)/10 + 3*sin(2*x1 - x2)/80 + 3*sin(2*x1 + x2)/80 - 9*cos(x1 - 2*x2)/400 + 9*cos(x1 + 2*x2)/400"]],
        box_lo: &[0.0, 0.0],
        box_hi: &[6.283185307179586, 6.283185307179586],
    },
];
