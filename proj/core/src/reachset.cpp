#include <overtake/reachset.hpp>

#include <cmath>
#include <limits>

#include <json.hpp>

#include <overtake/errors.hpp>
#include <overtake/math.hpp>

namespace overtake
{

Eigen::Matrix<double, 5, 5> LinearizedStep::augmented () const
{
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero ();
    m.topLeftCorner<4, 4> () = A_star ();
    m.topRightCorner<4, 1> () = C_star ();
    return m;
}

Eigen::Matrix<double, 5, 5> LinearizedStep::augmented_continuous () const
{
    Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero ();
    m.topLeftCorner<4, 4> () = A_c;
    m.topRightCorner<4, 1> () = f - A_c * ref_state;
    return m;
}

LinearizedStep linearize_model (const VehicleState &ref, const VehicleInput &input, double r, const VehicleParams &params)
{
    if (!(r > 0.0))
        throw PreconditionError ("linearize_model: step must be positive");
    if (!(std::abs (input.steer) < 0.5 * kPi - 1e-9))
        throw LinearizationError ("linearize_model: steering angle " + std::to_string (input.steer) +
                                  " is at the tan singularity");
    const double L = params.wheelbase;
    const double c = std::cos (ref.theta), s = std::sin (ref.theta);
    const double cd = std::cos (input.steer);
    LinearizedStep out;
    out.A_c.setZero ();
    out.A_c (0, 2) = c;
    out.A_c (0, 3) = -ref.v * s;
    out.A_c (1, 2) = s;
    out.A_c (1, 3) = ref.v * c;
    out.A_c (3, 2) = std::tan (input.steer) / L;
    out.B_c.setZero ();
    out.B_c (2, 0) = 1.0;
    out.B_c (3, 1) = ref.v / (L * cd * cd);
    out.ref_state = ref.as_vector ();
    out.ref_input = input.as_vector ();
    out.f = bicycle_rhs (out.ref_state, out.ref_input, L);
    out.r = r;
    return out;
}

Eigen::MatrixXd expm (const Eigen::MatrixXd &A)
{
    const Eigen::Index n = A.rows ();
    const double norm = A.cwiseAbs ().colwise ().sum ().maxCoeff ();
    int squarings = 0;
    if (norm > 0.5)
        squarings = static_cast<int> (std::ceil (std::log2 (norm / 0.5)));
    const Eigen::MatrixXd As = A / std::ldexp (1.0, squarings);
    // Horner form of sum_{i<=18} As^i / i!
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity (n, n);
    for (int i = 18; i >= 1; --i)
        E = Eigen::MatrixXd::Identity (n, n) + As * E / static_cast<double> (i);
    for (int i = 0; i < squarings; ++i)
        E = E * E;
    return E;
}

namespace
{

/// sum_{i > order} M^i / i! for a non-negative matrix M.
Eigen::MatrixXd series_tail (const Eigen::MatrixXd &M, int order)
{
    const Eigen::Index n = M.rows ();
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity (n, n);
    for (int i = 1; i <= order; ++i)
        term = term * M / static_cast<double> (i);
    Eigen::MatrixXd tail = Eigen::MatrixXd::Zero (n, n);
    for (int i = order + 1; i < order + 400; ++i)
    {
        term = term * M / static_cast<double> (i);
        tail += term;
        const double t = term.cwiseAbs ().maxCoeff ();
        if (t == 0.0 || t < 1e-17 * tail.cwiseAbs ().maxCoeff ())
            return tail;
    }
    // Slow convergence: fall back to the closed form.
    Eigen::MatrixXd partial = Eigen::MatrixXd::Identity (n, n), p = partial;
    for (int i = 1; i <= order; ++i)
    {
        p = p * M / static_cast<double> (i);
        partial += p;
    }
    return (expm (M) - partial).cwiseMax (0.0);
}

} // namespace

TaylorTerms taylor_propagation_terms (const Eigen::MatrixXd &A, double r, int order)
{
    if (order < 2)
        throw PreconditionError ("taylor_propagation_terms: order must be at least 2");
    if (!(r > 0.0))
        throw PreconditionError ("taylor_propagation_terms: step must be positive");
    const Eigen::Index n = A.rows ();
    TaylorTerms out;
    out.expm = expm (A * r);

    out.gamma_sum = Eigen::MatrixXd::Zero (n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity (n, n); // A^i
    double scale = r;                                          // r^{i+1} / (i+1)!
    std::vector<Eigen::MatrixXd> powers{power};
    for (int i = 0; i <= order; ++i)
    {
        out.gamma.push_back (power * scale);
        out.gamma_sum += out.gamma.back ();
        power = power * A;
        powers.push_back (power);
        scale *= r / static_cast<double> (i + 2);
    }

    out.remainder = series_tail (A.cwiseAbs () * r, order);
    out.eps_p = IntervalMatrix::symmetric (out.remainder * r);

    Eigen::MatrixXd lo = -out.remainder, hi = out.remainder;
    double factorial = 1.0;
    for (int i = 2; i <= order; ++i)
    {
        factorial *= static_cast<double> (i);
        const double di = static_cast<double> (i);
        const double coeff = (std::pow (di, -di / (di - 1.0)) - std::pow (di, -1.0 / (di - 1.0))) * std::pow (r, di);
        const Eigen::MatrixXd term = powers[static_cast<std::size_t> (i)] * (coeff / factorial);
        lo += term.cwiseMin (0.0);
        hi += term.cwiseMax (0.0);
    }
    out.hull_error = IntervalMatrix (lo, hi);
    return out;
}

Zonotope input_reach (const TaylorTerms &terms, const Zonotope &U)
{
    const Eigen::Index n = U.dim ();
    const Eigen::Index m = U.generator_count ();
    Eigen::MatrixXd g (n, m * static_cast<Eigen::Index> (terms.gamma.size ()));
    for (std::size_t i = 0; i < terms.gamma.size (); ++i)
        g.middleCols (static_cast<Eigen::Index> (i) * m, m) = terms.gamma[i] * U.generators ();
    const Eigen::VectorXd spread = terms.eps_p.upper * (U.center ().cwiseAbs () + U.radius ());
    return Zonotope (terms.gamma_sum * U.center (), std::move (g)).compact () +
           Zonotope::box (Eigen::VectorXd::Zero (n), spread);
}

namespace
{

struct StepSets
{
    Zonotope point;
    Zonotope interval;
};

/// Homogeneous part of one step in augmented coordinates: point image and interval enclosure.
StepSets homogeneous_step (const Zonotope &Rk, const TaylorTerms &terms)
{
    const Zonotope aug = Rk.augment (1.0);
    const Zonotope image = aug.linear_map (terms.expm);
    return {image, hull_enclosure (aug, image) + terms.hull_error * aug};
}

Zonotope lift (const Zonotope &z) { return z.augment (0.0); }

} // namespace

ReachTube propagate_linear_tube (const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, const Zonotope &initial,
                                 const Zonotope &input, double r, std::size_t steps, const TubeOptions &options)
{
    const Eigen::Index n = A.rows ();
    if (A.cols () != n || B.rows () != n || B.cols () != input.dim () || initial.dim () != n)
        throw PreconditionError ("propagate_linear_tube: dimension mismatch");
    Eigen::MatrixXd Aa = Eigen::MatrixXd::Zero (n + 1, n + 1);
    Aa.topLeftCorner (n, n) = A;
    Aa.topRightCorner (n, 1) = B * input.center ();
    const TaylorTerms terms = taylor_propagation_terms (Aa, r, options.taylor_order);
    const Zonotope deviation (Eigen::VectorXd::Zero (n), B * input.generators ());
    const Zonotope Rp = input_reach (terms, lift (deviation));

    ReachTube tube;
    tube.point_sets.push_back (initial);
    tube.times.push_back (0.0);
    for (std::size_t k = 0; k < steps; ++k)
    {
        const StepSets h = homogeneous_step (tube.point_sets.back (), terms);
        tube.interval_sets.push_back ((h.interval + Rp).project (n).reduce (options.max_generators));
        tube.point_sets.push_back ((h.point + Rp).project (n).reduce (options.max_generators));
        tube.times.push_back (r * static_cast<double> (k + 1));
    }
    return tube;
}

std::vector<VehicleInput> step_reference_inputs (std::span<const FlatSample> samples)
{
    std::vector<VehicleInput> out;
    for (std::size_t k = 0; k + 1 < samples.size (); ++k)
        out.push_back ({0.5 * (samples[k].input.accel + samples[k + 1].input.accel),
                        0.5 * (samples[k].input.steer + samples[k + 1].input.steer)});
    return out;
}

Eigen::Vector4d align_heading (Eigen::Vector4d state, double near)
{
    state (3) = near + angle_diff (near, state (3));
    return state;
}

namespace
{

/// Bound on |f(z) - f(z*) - J (z - z*)| over |z - z*| <= (dx, du), from the Hessian of the bicycle model.
Eigen::Vector4d lagrange_bound (const Eigen::Vector4d &dx, const Eigen::Vector2d &du, const Eigen::Vector4d &ref,
                                const Eigen::Vector2d &u, double L)
{
    const double dv = dx (2), dth = dx (3), dd = du (1);
    const double v_abs = std::abs (ref (2)) + dv;
    const double sin_max = std::min (1.0, std::abs (std::sin (ref (3))) + dth);
    const double cos_max = std::min (1.0, std::abs (std::cos (ref (3))) + dth);
    const double delta_max = std::abs (u (1)) + dd;
    if (!(delta_max < 0.5 * kPi - 1e-6))
        throw LinearizationError ("lagrange_bound: steering range reaches the tan singularity");
    const double sec2 = 1.0 / (std::cos (delta_max) * std::cos (delta_max));
    const double tan_max = std::tan (delta_max);
    Eigen::Vector4d out;
    out (0) = 0.5 * (2.0 * sin_max * dv * dth + v_abs * cos_max * dth * dth);
    out (1) = 0.5 * (2.0 * cos_max * dv * dth + v_abs * sin_max * dth * dth);
    out (2) = 0.0;
    out (3) = 0.5 * (2.0 * sec2 / L * dv * dd + 2.0 * v_abs * sec2 * tan_max / L * dd * dd);
    return out;
}

Eigen::Vector4d deviation_box (const Zonotope &z, const Eigen::Vector4d &ref)
{
    const Eigen::Vector4d lo = z.lower ().head<4> (), hi = z.upper ().head<4> ();
    return (lo - ref).cwiseAbs ().cwiseMax ((hi - ref).cwiseAbs ());
}

} // namespace

ReachTube propagate_tube (std::span<const FlatSample> samples, const Eigen::Vector2d &input_radius, double r,
                          const VehicleParams &params, const TubeOptions &options)
{
    const std::vector<VehicleInput> inputs = step_reference_inputs (samples);
    return propagate_tube (samples, inputs, input_radius, r, params, options);
}

ReachTube propagate_tube (std::span<const FlatSample> samples, std::span<const VehicleInput> inputs,
                          const Eigen::Vector2d &input_radius, double r, const VehicleParams &params,
                          const TubeOptions &options)
{
    if (samples.size () < 2)
        throw PreconditionError ("propagate_tube: need at least two samples");
    if ((input_radius.array () < 0.0).any ())
        throw PreconditionError ("propagate_tube: negative input uncertainty");
    for (std::size_t k = 0; k + 1 < samples.size (); ++k)
        if (std::abs (samples[k + 1].t - samples[k].t - r) > 1e-9 * std::max (1.0, r))
            throw PreconditionError ("propagate_tube: sample spacing differs from the step at index " +
                                     std::to_string (k));
    if (inputs.size () + 1 != samples.size ())
        throw PreconditionError ("propagate_tube: need one reference input per step");

    std::vector<Eigen::Vector4d> refs;
    for (const auto &s : samples)
        refs.push_back (refs.empty () ? s.state.as_vector () : align_heading (s.state.as_vector (), refs.back () (3)));

    ReachTube tube;
    tube.point_sets.push_back (Zonotope::point (refs.front ()));
    tube.times.push_back (samples.front ().t);
    for (std::size_t k = 0; k + 1 < samples.size (); ++k)
    {
        // Linearizing mid-step keeps the affine model's drift second order in r.
        const Eigen::Vector4d lin_ref = 0.5 * (refs[k] + refs[k + 1]);
        const LinearizedStep lin = linearize_model (VehicleState::from_vector (lin_ref), inputs[k], r, params);
        const TaylorTerms terms = taylor_propagation_terms (lin.augmented_continuous (), r, options.taylor_order);
        const Zonotope U (Eigen::VectorXd::Zero (4), lin.B_c * input_radius.asDiagonal ());
        const Zonotope Rp = input_reach (terms, lift (U));
        const StepSets h = homogeneous_step (tube.point_sets.back (), terms);
        Zonotope point = h.point + Rp;
        Zonotope interval = h.interval + Rp;
        Eigen::Vector4d bound = Eigen::Vector4d::Zero ();

        if (options.lagrange_remainder)
        {
            // The error bound depends on the set it enlarges: grow a guess until it covers itself.
            Eigen::Vector4d guess = 1.5 * lagrange_bound (deviation_box (interval, lin_ref), input_radius, lin_ref,
                                                          lin.ref_input, params.wheelbase);
            bool converged = false;
            Zonotope RL;
            for (int iter = 0; iter < 30 && !converged; ++iter)
            {
                Eigen::VectorXd lifted = Eigen::VectorXd::Zero (5);
                lifted.head<4> () = guess;
                RL = input_reach (terms, Zonotope::box (Eigen::VectorXd::Zero (5), lifted));
                const Eigen::Vector4d need = lagrange_bound (deviation_box (interval + RL, lin_ref), input_radius,
                                                             lin_ref, lin.ref_input, params.wheelbase);
                if ((need.array () <= guess.array ()).all ())
                    converged = true;
                else
                    guess = 1.5 * guess.cwiseMax (need);
            }
            if (!converged)
                throw LinearizationError ("propagate_tube: linearization error bound did not converge at step " +
                                          std::to_string (k));
            point = point + RL;
            interval = interval + RL;
            bound = guess;
        }
        tube.interval_sets.push_back (interval.project (4).reduce (options.max_generators));
        tube.point_sets.push_back (point.project (4).reduce (options.max_generators));
        tube.times.push_back (samples[k + 1].t);
        tube.lagrange.push_back (bound);
    }
    return tube;
}

FeasibilityResult assess_feasibility (std::span<const FlatSample> samples, const ReachTube &tube, double tol)
{
    if (samples.size () != tube.point_sets.size ())
        throw PreconditionError ("assess_feasibility: samples and tube are not aligned");
    FeasibilityResult out;
    for (std::size_t k = 0; k < tube.interval_sets.size (); ++k)
    {
        const Zonotope &z = tube.interval_sets[k];
        const Eigen::Vector4d state = align_heading (samples[k].state.as_vector (), z.center () (3));
        if (!zonotope_contains (z, state, tol))
        {
            out.first_violation = k;
            return out;
        }
    }
    out.high = true;
    return out;
}

void FeasibilityWeights::validate () const
{
    for (const auto &[v, name] :
         {std::pair{lambda_p, "feasibility.lambda1"}, std::pair{lambda_v, "feasibility.lambda2"},
          std::pair{lambda_theta, "feasibility.lambda3"}, std::pair{d_r, "feasibility.d_r"},
          std::pair{v_r, "feasibility.v_r"}, std::pair{theta_r, "feasibility.theta_r"}})
        if (!(v > 0.0))
            throw ValidationError (name, "must be positive");
}

JrsScore score_jrs (std::span<const FlatSample> samples, const ReachTube &tube, const FeasibilityWeights &w)
{
    if (samples.size () != tube.point_sets.size () || samples.size () < 2)
        throw PreconditionError ("score_jrs: samples and tube are not aligned");
    JrsScore out;
    const std::size_t N = samples.size () - 1;
    for (std::size_t k = 1; k <= N; ++k)
    {
        const Eigen::VectorXd &c = tube.point_sets[k].center ();
        const VehicleState &s = samples[k].state;
        out.position += std::hypot (s.x - c (0), s.y - c (1));
        out.speed += std::abs (s.v - c (2));
        out.heading += std::abs (angle_diff (c (3), s.theta));
    }
    const double n = static_cast<double> (N);
    out.position /= n;
    out.speed /= n;
    out.heading /= n;
    out.total = w.lambda_p * out.position / w.d_r + w.lambda_v * out.speed / w.v_r +
                w.lambda_theta * out.heading / w.theta_r;
    return out;
}

namespace
{

nlohmann::json zonotope_json (const Zonotope &z)
{
    nlohmann::json gens = nlohmann::json::array ();
    for (Eigen::Index j = 0; j < z.generator_count (); ++j)
        gens.push_back (std::vector<double> (z.generators ().col (j).data (), z.generators ().col (j).data () + z.dim ()));
    return {{"center", std::vector<double> (z.center ().data (), z.center ().data () + z.dim ())}, {"generators", gens}};
}

} // namespace

std::string tube_to_json (const ReachTube &tube)
{
    nlohmann::json steps = nlohmann::json::array ();
    for (std::size_t k = 0; k < tube.point_sets.size (); ++k)
    {
        nlohmann::json step{{"k", k}, {"t", tube.times[k]}, {"point_set", zonotope_json (tube.point_sets[k])}};
        if (k < tube.interval_sets.size ())
            step["interval_set"] = zonotope_json (tube.interval_sets[k]);
        steps.push_back (step);
    }
    return nlohmann::json{{"state_order", {"x", "y", "v", "theta"}}, {"steps", steps}}.dump (2);
}

} // namespace overtake
