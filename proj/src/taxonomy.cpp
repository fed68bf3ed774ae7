#include "seeaction/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace seeaction {
namespace {

constexpr std::array<std::string_view, kNumCommands> kCommandNames = {
    "click", "drag", "hover", "scroll down", "scroll up", "select", "type", "zoom in", "zoom out", "appear", "disappear"};

constexpr std::array<std::string_view, kNumWidgets> kWidgetNames = {
    "Button", "Checkbox", "Dropdown", "Icon", "Image", "Text", "Window", "Page", "Tab", "Popup", "Others"};

// Lowercase with separators removed, so "Scroll_Down" == "scroll down".
std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view command_name(CommandClass c) { return kCommandNames.at(static_cast<size_t>(c)); }
std::string_view widget_name(WidgetClass w) { return kWidgetNames.at(static_cast<size_t>(w)); }

std::optional<CommandClass> parse_command(std::string_view s) {
  const std::string key = squash(s);
  for (int i = 0; i < kNumCommands; ++i) {
    if (squash(kCommandNames[i]) == key) return static_cast<CommandClass>(i);
  }
  return std::nullopt;
}

std::optional<WidgetClass> parse_widget(std::string_view s) {
  const std::string key = squash(s);
  for (int i = 0; i < kNumWidgets; ++i) {
    if (squash(kWidgetNames[i]) == key) return static_cast<WidgetClass>(i);
  }
  return std::nullopt;
}

CommandClass command_from_id(int id) {
  if (id < 0 || id >= kNumCommands) throw std::out_of_range("command id out of range: " + std::to_string(id));
  return static_cast<CommandClass>(id);
}

WidgetClass widget_from_id(int id) {
  if (id < 0 || id >= kNumWidgets) throw std::out_of_range("widget id out of range: " + std::to_string(id));
  return static_cast<WidgetClass>(id);
}

const std::array<CommandClass, kNumCommands>& all_commands() {
  static const std::array<CommandClass, kNumCommands> all = [] {
    std::array<CommandClass, kNumCommands> a{};
    for (int i = 0; i < kNumCommands; ++i) a[i] = static_cast<CommandClass>(i);
    return a;
  }();
  return all;
}

const std::array<WidgetClass, kNumWidgets>& all_widgets() {
  static const std::array<WidgetClass, kNumWidgets> all = [] {
    std::array<WidgetClass, kNumWidgets> a{};
    for (int i = 0; i < kNumWidgets; ++i) a[i] = static_cast<WidgetClass>(i);
    return a;
  }();
  return all;
}

const std::vector<WidgetClass>& compatible_widgets(CommandClass c) {
  using W = WidgetClass;
  static const std::array<std::vector<WidgetClass>, kNumCommands> table = {{
      /* Click */ {W::Button, W::Checkbox, W::Dropdown, W::Icon, W::Tab, W::Text, W::Others},
      /* Drag */ {W::Icon, W::Image, W::Window, W::Others},
      /* Hover */ {W::Button, W::Icon, W::Image, W::Tab},
      /* ScrollDown */ {W::Page},
      /* ScrollUp */ {W::Page},
      /* Select */ {W::Text, W::Page},
      /* Type */ {W::Text},
      /* ZoomIn */ {W::Image, W::Page},
      /* ZoomOut */ {W::Image, W::Page},
      /* Appear */ {W::Popup, W::Window},
      /* Disappear */ {W::Popup, W::Window},
  }};
  return table.at(static_cast<size_t>(c));
}

bool is_compatible(CommandClass c, WidgetClass w) {
  const auto& ws = compatible_widgets(c);
  return std::find(ws.begin(), ws.end(), w) != ws.end();
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

}  // namespace seeaction
