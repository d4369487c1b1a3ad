#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unistd.h>

#include "cli.hpp"

namespace rangekin::cli {

using nlohmann::json;

namespace {

using mc::Stage;

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::size_t idx(Stage s) { return static_cast<std::size_t>(s); }

std::pair<Stage, Stage> swept_stages(Experiment e) {
  return e == Experiment::Velocity ? std::pair{Stage::VelocityLs, Stage::VelocityWls}
                                   : std::pair{Stage::AccelLs, Stage::AccelWls};
}

json vec_json(const Vec2& v) { return {{"x", v.x()}, {"y", v.y()}}; }

json kinematic_json(const KinematicEstimate& k) {
  json j = vec_json(k.value);
  j["method"] = k.method == Method::LS ? "LS" : "WLS";
  j["gram_condition"] = k.gram_condition;
  j["residual_norm"] = k.residual_norm;
  return j;
}

// Decade bounds enclosing [lo, hi].
std::pair<double, double> decades(double lo, double hi) {
  double a = std::floor(std::log10(lo));
  double b = std::ceil(std::log10(hi));
  if (a == b) b = a + 1;
  return {a, b};
}

}  // namespace

std::string sweep_csv(const mc::SweepResult& sweep, Experiment experiment, bool with_timing) {
  const auto [ls, wls] = swept_stages(experiment);
  std::string out =
      "sigma,rmse_pos,rmse_vel_ls,rmse_vel_wls,rmse_acc_ls,rmse_acc_wls,failures,t_ls_us,t_wls_us\n";
  for (const mc::SweepPoint& p : sweep.points) {
    out += num(p.sigma);
    for (Stage s : mc::kStages) out += "," + num(p.rmse[idx(s)]);
    out += fmt::format(",{}", p.failures);
    if (with_timing) {
      out += "," + num(p.mean_runtime[idx(ls)] * 1e6) + "," + num(p.mean_runtime[idx(wls)] * 1e6);
    } else {
      out += ",,";
    }
    out += '\n';
  }
  return out;
}

json sweep_json(const mc::SweepResult& sweep, bool with_timing) {
  json points = json::array();
  for (const mc::SweepPoint& p : sweep.points) {
    json rmse, runtime;
    for (Stage s : mc::kStages) {
      rmse[std::string(mc::to_string(s))] = p.rmse[idx(s)];
      runtime[std::string(mc::to_string(s))] = p.mean_runtime[idx(s)] * 1e6;
    }
    json point{{"sigma", p.sigma}, {"rmse", rmse}, {"attempted", p.attempted}, {"failures", p.failures}};
    if (with_timing) point["mean_runtime_us"] = runtime;
    points.push_back(std::move(point));
  }
  return {{"parameter", sweep.parameter}, {"points", points}};
}

std::string sweep_svg(const mc::SweepResult& sweep, Experiment experiment) {
  constexpr double width = 640, height = 480, left = 80, right = 150, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const auto [ls, wls] = swept_stages(experiment);

  double xmin = std::numeric_limits<double>::infinity(), xmax = 0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0;
  for (const mc::SweepPoint& p : sweep.points) {
    xmin = std::min(xmin, p.sigma);
    xmax = std::max(xmax, p.sigma);
    for (Stage s : {ls, wls}) {
      const double v = p.rmse[idx(s)];
      if (v > 0) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (!(ymax > 0)) ymin = 0.1, ymax = 1;
  const auto [x0, x1] = decades(xmin, xmax);
  const auto [y0, y1] = decades(ymin, ymax);
  auto px = [&](double v) { return left + (std::log10(v) - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double v) { return top + plot_h - (std::log10(v) - y0) / (y1 - y0) * plot_h; };

  const bool vel = experiment == Experiment::Velocity;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" font-size=\"14\">{}</text>\n"
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      width, height, left, vel ? "Velocity RMSE vs range-rate noise" : "Acceleration RMSE vs range-rate-derivative noise",
      left, top, plot_w, plot_h);

  for (double d = x0; d <= x1; ++d) {
    const double x = px(std::pow(10.0, d));
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">1e{4}</text>\n",
        x, top, top + plot_h, top + plot_h + 18, static_cast<int>(d));
  }
  for (double d = y0; d <= y1; ++d) {
    const double y = py(std::pow(10.0, d));
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{3}\" y=\"{1:.2f}\" text-anchor=\"end\" dominant-baseline=\"middle\">1e{4}</text>\n",
        left, y, left + plot_w, left - 6, static_cast<int>(d));
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     left + plot_w / 2, height - 16,
                     vel ? "sigma range rate (m/s)" : "sigma derivative of range rate (m/s^2)");
  svg += fmt::format(
      "<text transform=\"translate(20,{:.2f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      top + plot_h / 2, vel ? "velocity RMSE (m/s)" : "acceleration RMSE (m/s^2)");

  const std::array<std::pair<Stage, const char*>, 2> series{{{ls, "#1f77b4"}, {wls, "#d62728"}}};
  double legend_y = top + 10;
  for (const auto& [stage, color] : series) {
    std::string points;
    std::string markers;
    for (const mc::SweepPoint& p : sweep.points) {
      const double v = p.rmse[idx(stage)];
      if (!(v > 0)) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(p.sigma), py(v));
      markers += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                             px(p.sigma), py(v), color);
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                       color, points);
    svg += markers;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4}\" y=\"{1:.2f}\" dominant-baseline=\"middle\">{5}</text>\n",
        left + plot_w + 10, legend_y, left + plot_w + 34, color, left + plot_w + 40,
        mc::to_string(stage));
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

json estimation_json(const EstimationResult& r) {
  json pos = vec_json(r.position.position);
  pos["theta3"] = r.position.theta3;
  pos["residual_norm"] = r.position.residual_norm;
  pos["condition"] = r.position.condition;
  return {{"position", pos},
          {"velocity_ls", kinematic_json(r.velocity_ls)},
          {"velocity_wls", kinematic_json(r.velocity_wls)},
          {"accel_ls", kinematic_json(r.accel_ls)},
          {"accel_wls", kinematic_json(r.accel_wls)}};
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw ConfigError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into place at " + path.string() + ": " + ec.message());
  }
}

}  // namespace rangekin::cli
