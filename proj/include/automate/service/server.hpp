#pragma once

// HTTP JSON API over a part store and loaded models.

#include "automate/dataset/corpus.hpp"
#include "automate/service/suggest.hpp"
#include "automate/tessellate.hpp"

#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>

namespace automate::service {

struct ApiResponse {
  int status = 200;
  std::string body;
};

inline ApiResponse json_response(const Json& j, int status = 200) { return {status, j.dump()}; }

inline ApiResponse error_response(int status, const std::string& message, const std::string& id = "") {
  Json j{{"error", message}};
  if (!id.empty()) j["id"] = id;
  return json_response(j, status);
}

struct ServiceOptions {
  std::filesystem::path part_dir;  // empty: in-memory only
};

/// Endpoint logic, independent of the transport. All methods are safe to
/// call concurrently.
class Service {
 public:
  Service(Suggester suggester, ServiceOptions opt = {}) : suggester_(std::move(suggester)), opt_(std::move(opt)) {}

  PartStore& parts() { return parts_; }
  const Suggester& suggester() const { return suggester_; }

  void set_model_hash(std::string h) { model_hash_ = std::move(h); }

  /// Loads every part under `dir/parts`.
  void load_part_dir(const std::filesystem::path& dir) {
    for (auto& [id, p] : dataset::load_parts(dir)) parts_.put(std::move(p));
  }

  ApiResponse health() const { return json_response(Json{{"status", "ok"}, {"model_hash", model_hash_}}); }

  ApiResponse post_part(const std::string& body) {
    return guarded([&] {
      Part p = load_part(body);
      const std::string id = p.id();
      if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." || id == "..")
        throw RequestError("invalid part id '" + id + "'");
      if (!opt_.part_dir.empty()) dataset::write_file(opt_.part_dir / "parts" / (id + ".json"), save_part(p));
      parts_.put(std::move(p));
      return json_response(Json{{"part_id", id}}, 201);
    });
  }

  ApiResponse get_part(const std::string& id) const {
    return guarded([&] { return json_response(part_to_json(*parts_.get(id))); });
  }

  ApiResponse get_mesh(const std::string& id, int resolution) const {
    return guarded([&] { return json_response(mesh_to_json(tessellate(*parts_.get(id), resolution))); });
  }

  ApiResponse post_suggest(const std::string& body) const {
    return guarded([&] {
      const Json j = request_json(body);
      const auto a = parts_.get(field<std::string>(j, "part_a"));
      const auto b = parts_.get(field<std::string>(j, "part_b"));
      const int k = j.contains("k") ? field<int>(j, "k") : kDefaultK;
      const bool merge = j.contains("merge_equivalent") && field<bool>(j, "merge_equivalent");
      return json_response(
          to_json(suggester_.suggest(*a, *b, field<std::string>(j, "face_a"), field<std::string>(j, "face_b"), k, merge)));
    });
  }

  ApiResponse post_mate_type(const std::string& body) const {
    return guarded([&] {
      const Json j = request_json(body);
      const auto a = parts_.get(field<std::string>(j, "part_a"));
      const auto b = parts_.get(field<std::string>(j, "part_b"));
      if (!j.contains("mcf_a") || !j.contains("mcf_b")) throw RequestError("missing field 'mcf_a' or 'mcf_b'");
      return json_response(to_json(suggester_.rank_types(*a, *b, mcf_from_request(j["mcf_a"]), mcf_from_request(j["mcf_b"]))));
    });
  }

 private:
  static Json request_json(const std::string& body) {
    try {
      Json j = Json::parse(body);
      if (!j.is_object()) throw RequestError("request body must be a JSON object");
      return j;
    } catch (const Json::parse_error& e) {
      throw RequestError(std::string("malformed JSON: ") + e.what());
    }
  }

  template <class V>
  static V field(const Json& j, const char* name) {
    if (!j.contains(name)) throw RequestError(std::string("missing field '") + name + "'");
    try {
      return j.at(name).get<V>();
    } catch (const Json::exception&) {
      throw RequestError(std::string("field '") + name + "' has the wrong type");
    }
  }

  template <class Fn>
  static ApiResponse guarded(Fn&& fn) {
    try {
      return fn();
    } catch (const NotFoundError& e) {
      return error_response(404, e.what(), e.id());
    } catch (const RequestError& e) {
      return error_response(e.status(), e.what());
    } catch (const BrepError& e) {
      return error_response(e.category() == BrepError::Category::unsupported ? 422 : 400, e.what(), e.entity());
    } catch (const std::exception& e) {
      return error_response(500, e.what());
    }
  }

  PartStore parts_;
  Suggester suggester_;
  ServiceOptions opt_;
  std::string model_hash_;
};

using RequestLog = std::function<void(const std::string& method, const std::string& path, int status, double ms)>;

inline RequestLog stderr_log() {
  return [](const std::string& method, const std::string& path, int status, double ms) {
    std::ostringstream line;
    line << method << ' ' << path << ' ' << status << ' ' << std::fixed << std::setprecision(2) << ms << "ms\n";
    std::cerr << line.str();
  };
}

/// Registers the /api routes (and an optional static mount) on `server`.
inline void mount_routes(httplib::Server& server, Service& svc, const RequestLog& log = {},
                         const std::string& static_dir = "") {
  auto reply = [log](const httplib::Request& req, httplib::Response& res, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    const ApiResponse r = fn();
    res.status = r.status;
    res.set_content(r.body, "application/json");
    if (log)
      log(req.method, req.path, r.status,
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  };
  server.Get("/api/health", [&svc, reply](const auto& req, auto& res) { reply(req, res, [&] { return svc.health(); }); });
  server.Post("/api/parts",
              [&svc, reply](const auto& req, auto& res) { reply(req, res, [&] { return svc.post_part(req.body); }); });
  server.Get(R"(/api/parts/([^/]+)/mesh)", [&svc, reply](const httplib::Request& req, auto& res) {
    reply(req, res, [&] {
      int resolution = 32;
      if (req.has_param("resolution")) {
        try {
          resolution = std::stoi(req.get_param_value("resolution"));
        } catch (const std::exception&) {
          return error_response(400, "resolution must be an integer");
        }
      }
      return svc.get_mesh(req.matches[1], resolution);
    });
  });
  server.Get(R"(/api/parts/([^/]+))", [&svc, reply](const httplib::Request& req, auto& res) {
    reply(req, res, [&] { return svc.get_part(req.matches[1]); });
  });
  server.Post("/api/suggest",
              [&svc, reply](const auto& req, auto& res) { reply(req, res, [&] { return svc.post_suggest(req.body); }); });
  server.Post("/api/mate-type", [&svc, reply](const auto& req, auto& res) {
    reply(req, res, [&] { return svc.post_mate_type(req.body); });
  });
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir))
    throw std::runtime_error("static directory not found: " + static_dir);
}

}  // namespace automate::service
