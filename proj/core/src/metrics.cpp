// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pastnet/error.hpp"

namespace pastnet::metrics {

namespace {

std::string shape_str(const std::array<std::int64_t, 4>& s) {
    return "(" + std::to_string(s[0]) + ", " + std::to_string(s[1]) + ", " + std::to_string(s[2]) + ", " +
           std::to_string(s[3]) + ")";
}

void require_same(const VideoView& a, const VideoView& b) {
    if (a.shape != b.shape)
        throw ShapeError("metric inputs differ in shape: " + shape_str(a.shape) + " vs " + shape_str(b.shape));
    if (static_cast<std::int64_t>(a.data.size()) != a.frames() * a.frame_size() ||
        static_cast<std::int64_t>(b.data.size()) != b.frames() * b.frame_size())
        throw ShapeError("metric input buffer does not match its shape " + shape_str(a.shape));
}

using Image = std::vector<double>;

struct Scaled {
    Image px;
    std::int64_t h, w;
};

Scaled to_image(const Plane& p) {
    if (static_cast<std::int64_t>(p.data.size()) != p.height * p.width) throw ShapeError("plane buffer size mismatch");
    return {Image(p.data.begin(), p.data.end()), p.height, p.width};
}

Scaled downsample(const Scaled& s) {
    Scaled out{{}, s.h / 2, s.w / 2};
    out.px.resize(static_cast<std::size_t>(out.h * out.w));
    for (std::int64_t i = 0; i < out.h; ++i) {
        for (std::int64_t j = 0; j < out.w; ++j) {
            const auto a = static_cast<std::size_t>(2 * i * s.w + 2 * j);
            const auto b = a + static_cast<std::size_t>(s.w);
            out.px[static_cast<std::size_t>(i * out.w + j)] = 0.25 * (s.px[a] + s.px[a + 1] + s.px[b] + s.px[b + 1]);
        }
    }
    return out;
}

std::vector<double> gaussian_window(std::int64_t size, double sigma) {
    std::vector<double> g(static_cast<std::size_t>(size));
    const double c = 0.5 * static_cast<double>(size - 1);
    double sum = 0.0;
    for (std::int64_t i = 0; i < size; ++i) {
        const double d = static_cast<double>(i) - c;
        g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += g[static_cast<std::size_t>(i)];
    }
    for (auto& v : g) v /= sum;
    return g;
}

// Separable valid-mode filtering.
Image filter_valid(const Image& img, std::int64_t h, std::int64_t w, const std::vector<double>& g) {
    const auto k = static_cast<std::int64_t>(g.size());
    const std::int64_t oh = h - k + 1, ow = w - k + 1;
    Image rows(static_cast<std::size_t>(h * ow));
    for (std::int64_t i = 0; i < h; ++i)
        for (std::int64_t j = 0; j < ow; ++j) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < k; ++t) acc += g[static_cast<std::size_t>(t)] * img[static_cast<std::size_t>(i * w + j + t)];
            rows[static_cast<std::size_t>(i * ow + j)] = acc;
        }
    Image out(static_cast<std::size_t>(oh * ow));
    for (std::int64_t i = 0; i < oh; ++i)
        for (std::int64_t j = 0; j < ow; ++j) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < k; ++t) acc += g[static_cast<std::size_t>(t)] * rows[static_cast<std::size_t>((i + t) * ow + j)];
            out[static_cast<std::size_t>(i * ow + j)] = acc;
        }
    return out;
}

struct SsimParts {
    double luminance_cs;  // mean of l * cs
    double cs;            // mean of cs
};

SsimParts ssim_parts(const Scaled& x, const Scaled& y, std::int64_t window, const SsimOptions& opt, double range) {
    const auto g = gaussian_window(window, opt.sigma);
    Image xx(x.px.size()), yy(x.px.size()), xy(x.px.size());
    for (std::size_t k = 0; k < x.px.size(); ++k) {
        xx[k] = x.px[k] * x.px[k];
        yy[k] = y.px[k] * y.px[k];
        xy[k] = x.px[k] * y.px[k];
    }
    const Image mx = filter_valid(x.px, x.h, x.w, g);
    const Image my = filter_valid(y.px, y.h, y.w, g);
    const Image sxx = filter_valid(xx, x.h, x.w, g);
    const Image syy = filter_valid(yy, x.h, x.w, g);
    const Image sxy = filter_valid(xy, x.h, x.w, g);
    const double c1 = (opt.k1 * range) * (opt.k1 * range);
    const double c2 = (opt.k2 * range) * (opt.k2 * range);
    double lcs = 0.0, cs = 0.0;
    for (std::size_t k = 0; k < mx.size(); ++k) {
        const double vx = sxx[k] - mx[k] * mx[k];
        const double vy = syy[k] - my[k] * my[k];
        const double cov = sxy[k] - mx[k] * my[k];
        const double l = (2.0 * mx[k] * my[k] + c1) / (mx[k] * mx[k] + my[k] * my[k] + c1);
        const double c = (2.0 * cov + c2) / (vx + vy + c2);
        lcs += l * c;
        cs += c;
    }
    const auto n = static_cast<double>(mx.size());
    return {lcs / n, cs / n};
}

std::int64_t fit_window(std::int64_t h, std::int64_t w, std::int64_t requested, SsimInfo* info) {
    const auto m = std::min(h, w);
    if (m >= requested) return requested;
    auto win = m % 2 == 1 ? m : m - 1;
    win = std::max<std::int64_t>(win, 1);
    if (info)
        info->warnings.push_back("frame " + std::to_string(h) + "x" + std::to_string(w) + " smaller than the " +
                                 std::to_string(requested) + "-pixel window; using window " + std::to_string(win) +
                                 " and a single scale");
    return win;
}

}  // namespace

PixelErrors pixel_errors(const VideoView& pred, const VideoView& target, Reduction reduction) {
    require_same(pred, target);
    double se = 0.0, ae = 0.0;
    for (std::size_t k = 0; k < pred.data.size(); ++k) {
        const double d = static_cast<double>(pred.data[k]) - static_cast<double>(target.data[k]);
        se += d * d;
        ae += std::abs(d);
    }
    const double denom = reduction == Reduction::PerPixelMean ? static_cast<double>(pred.data.size())
                                                              : static_cast<double>(pred.frames());
    return {se / denom, ae / denom};
}

double ssim(const Plane& pred, const Plane& target, double data_range, const SsimOptions& opt, SsimInfo* info) {
    if (pred.height != target.height || pred.width != target.width) throw ShapeError("ssim: plane sizes differ");
    const auto win = fit_window(pred.height, pred.width, opt.window, info);
    if (info) {
        info->window = win;
        info->scales = 1;
        info->weights = {1.0};
    }
    return ssim_parts(to_image(pred), to_image(target), win, opt, data_range).luminance_cs;
}

double ms_ssim(const Plane& pred, const Plane& target, double data_range, const SsimOptions& opt, SsimInfo* info) {
    if (pred.height != target.height || pred.width != target.width) throw ShapeError("ms_ssim: plane sizes differ");
    const auto win = fit_window(pred.height, pred.width, opt.window, info);
    int scales = 1;
    if (win == opt.window) {
        auto m = std::min(pred.height, pred.width);
        while (scales < static_cast<int>(kMsSsimWeights.size()) && m / 2 >= opt.window) {
            m /= 2;
            ++scales;
        }
    }
    std::vector<double> weights(kMsSsimWeights.begin(), kMsSsimWeights.begin() + scales);
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (auto& w : weights) w /= wsum;
    if (info) {
        info->window = win;
        info->scales = scales;
        info->weights = weights;
    }

    Scaled x = to_image(pred), y = to_image(target);
    if (scales == 1) return ssim_parts(x, y, win, opt, data_range).luminance_cs;

    // Negative contrast terms are clamped before fractional powers.
    double result = 1.0;
    for (int s = 0; s < scales; ++s) {
        const auto parts = ssim_parts(x, y, win, opt, data_range);
        const double base = s + 1 == scales ? parts.luminance_cs : parts.cs;
        result *= std::pow(std::max(base, 0.0), weights[static_cast<std::size_t>(s)]);
        if (s + 1 < scales) {
            x = downsample(x);
            y = downsample(y);
        }
    }
    return result;
}

double psnr(const VideoView& pred, const VideoView& target, double data_range) {
    const auto e = pixel_errors(pred, target, Reduction::PerPixelMean);
    if (e.mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(data_range * data_range / e.mse);
}

double relative_l2(const VideoView& pred, const VideoView& target) {
    require_same(pred, target);
    double mean = 0.0;
    for (float v : target.data) mean += static_cast<double>(v);
    mean /= static_cast<double>(target.data.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < target.data.size(); ++k) {
        const double y = static_cast<double>(target.data[k]);
        const double a = y - static_cast<double>(pred.data[k]);
        const double b = y - mean;
        num += a * a;
        den += b * b;
    }
    if (den == 0.0) throw std::domain_error("relative_l2: target is constant, denominator ||y - mean(y)|| is zero");
    return std::sqrt(num) / std::sqrt(den);
}

namespace {

nlohmann::json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double parse_number(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("unexpected metric string " + s);
    }
    return j.get<double>();
}

}  // namespace

nlohmann::json MetricReport::to_json() const {
    nlohmann::json conv = conventions;
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : per_frame)
        frames.push_back({{"mse_pixel", f.mse_pixel},
                          {"mae_pixel", f.mae_pixel},
                          {"ssim", f.ssim},
                          {"psnr", number_or_inf(f.psnr)}});
    conv["per_frame"] = frames;
    return {{"mse_pixel", mse_pixel},
            {"mse_frame_sum", mse_frame_sum},
            {"mae_pixel", mae_pixel},
            {"mae_frame_sum", mae_frame_sum},
            {"ssim", ssim},
            {"ms_ssim", ms_ssim},
            {"psnr", number_or_inf(psnr)},
            {"rel_l2", std::isnan(rel_l2) ? nlohmann::json(nullptr) : nlohmann::json(rel_l2)},
            {"lpips", nullptr},
            {"conventions", conv}};
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
    MetricReport r;
    r.mse_pixel = j.at("mse_pixel").get<double>();
    r.mse_frame_sum = j.at("mse_frame_sum").get<double>();
    r.mae_pixel = j.at("mae_pixel").get<double>();
    r.mae_frame_sum = j.at("mae_frame_sum").get<double>();
    r.ssim = j.at("ssim").get<double>();
    r.ms_ssim = j.at("ms_ssim").get<double>();
    r.psnr = parse_number(j.at("psnr"));
    r.rel_l2 = j.at("rel_l2").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("rel_l2").get<double>();
    r.conventions = j.at("conventions");
    if (r.conventions.contains("per_frame")) {
        for (const auto& f : r.conventions["per_frame"])
            r.per_frame.push_back({f.at("mse_pixel").get<double>(), f.at("mae_pixel").get<double>(),
                                   f.at("ssim").get<double>(), parse_number(f.at("psnr"))});
        r.conventions.erase("per_frame");
    }
    return r;
}

MetricReport evaluate(const VideoView& pred, const VideoView& target, double data_range) {
    require_same(pred, target);
    MetricReport r;
    const auto pix = pixel_errors(pred, target, Reduction::PerPixelMean);
    const auto fs = pixel_errors(pred, target, Reduction::PerFrameSum);
    r.mse_pixel = pix.mse;
    r.mae_pixel = pix.mae;
    r.mse_frame_sum = fs.mse;
    r.mae_frame_sum = fs.mae;
    r.psnr = psnr(pred, target, data_range);

    bool constant_target = true;
    for (std::size_t k = 1; k < target.data.size() && constant_target; ++k)
        constant_target = target.data[k] == target.data[0];
    r.rel_l2 = constant_target ? std::numeric_limits<double>::quiet_NaN() : relative_l2(pred, target);

    SsimInfo info;
    double ssim_sum = 0.0, ms_sum = 0.0;
    const auto T = pred.frames(), C = pred.shape[1], plane = pred.plane_size();
    for (std::int64_t t = 0; t < T; ++t) {
        const auto off = static_cast<std::size_t>(t * pred.frame_size());
        const VideoView pf{pred.data.subspan(off, static_cast<std::size_t>(pred.frame_size())),
                           {1, pred.shape[1], pred.shape[2], pred.shape[3]}};
        const VideoView tf{target.data.subspan(off, static_cast<std::size_t>(pred.frame_size())), pf.shape};
        double frame_ssim = 0.0;
        for (std::int64_t c = 0; c < C; ++c) {
            const auto po = off + static_cast<std::size_t>(c * plane);
            const Plane p{pred.data.subspan(po, static_cast<std::size_t>(plane)), pred.shape[2], pred.shape[3]};
            const Plane q{target.data.subspan(po, static_cast<std::size_t>(plane)), pred.shape[2], pred.shape[3]};
            SsimInfo* sink = (t == 0 && c == 0) ? &info : nullptr;
            frame_ssim += ssim(p, q, data_range, {}, nullptr);
            ms_sum += ms_ssim(p, q, data_range, {}, sink);
        }
        frame_ssim /= static_cast<double>(C);
        ssim_sum += frame_ssim;
        const auto fe = pixel_errors(pf, tf, Reduction::PerPixelMean);
        r.per_frame.push_back({fe.mse, fe.mae, frame_ssim, psnr(pf, tf, data_range)});
    }
    r.ssim = ssim_sum / static_cast<double>(T);
    r.ms_ssim = ms_sum / static_cast<double>(T * C);
    r.conventions = {
        {"mse_pixel", "sum of squared error / (frames * C * H * W)"},
        {"mse_frame_sum", "sum over (C, H, W), mean over frames"},
        {"mae_pixel", "sum of absolute error / (frames * C * H * W)"},
        {"mae_frame_sum", "sum over (C, H, W), mean over frames"},
        {"data_range", data_range},
        {"frames", T},
        {"ssim_window", info.window},
        {"ssim_sigma", SsimOptions{}.sigma},
        {"ms_ssim_scales", info.scales},
        {"ms_ssim_weights", info.weights},
        {"warnings", info.warnings},
        {"lpips", "not computed"},
    };
    if (constant_target) r.conventions["warnings"].push_back("rel_l2 undefined for a constant target");
    return r;
}

}  // namespace pastnet::metrics
