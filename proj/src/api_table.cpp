#include "graftbench/api_table.hpp"

#include <algorithm>

namespace graftbench {

namespace {

// Table version 1. Order is load-bearing: feature indices, persisted corpora
// and ground-truth files all refer to these positions.
constexpr std::array<std::string_view, kApiCategoryCount> kCategoryNames = {
    "android.accounts.AccountManager",
    "android.app.Activity",
    "android.app.ActivityManager",
    "android.app.ActivityThread",
    "android.app.ApplicationPackageManager",
    "android.app.ContextImpl",
    "android.app.NotificationManager",
    "android.app.SharedPreferencesImpl$EditorImpl",
    "android.content.BroadcastReceiver",
    "android.content.ContentResolver",
    "android.content.ContentValues",
    "android.location.Location",
    "android.media.AudioRecord",
    "android.media.MediaRecorder",
    "android.net.ConnectivityManager",
    "android.net.wifi.WifiInfo",
    "android.os.Debug",
    "android.os.Process",
    "android.os.SystemProperties",
    "android.telephony.SmsManager",
    "android.telephony.TelephonyManager",
    "android.util.Base64",
    "android.system.BaseDexClassLoader",
    "android.system.DexClassLoader",
    "android.system.DexFile",
    "android.system.PathClassLoader",
    "java.io.FileInputStream",
    "java.io.FileOutputStream",
    "java.lang.ProcessBuilder",
    "java.lang.Runtime",
    "java.lang.reflect.Method",
    "java.net.URL",
    "javax.crypto.Cipher",
    "javax.crypto.Mac",
    "javax.crypto.spec.SecretKeySpec",
    "libcore.io.IoBridge",
    "org.apache.http.impl.client.AbstractHttpClient",
};

// Representative monitored methods per category. Corpus synthesis draws call
// emissions from these; ingestion accepts any method under a known class.
constexpr std::array<std::array<std::string_view, 3>, kApiCategoryCount> kCategoryMethods = {{
    {"getAccounts", "getAccountsByType", ""},
    {"startActivity", "", ""},
    {"getRunningTasks", "", ""},
    {"currentActivityThread", "", ""},
    {"getInstalledPackages", "getInstalledApplications", ""},
    {"registerReceiver", "", ""},
    {"notify", "", ""},
    {"putString", "putInt", "commit"},
    {"abortBroadcast", "", ""},
    {"query", "insert", "delete"},
    {"put", "", ""},
    {"getLatitude", "getLongitude", ""},
    {"startRecording", "", ""},
    {"start", "", ""},
    {"getActiveNetworkInfo", "", ""},
    {"getMacAddress", "", ""},
    {"isDebuggerConnected", "", ""},
    {"killProcess", "", ""},
    {"get", "", ""},
    {"sendTextMessage", "sendMultipartTextMessage", ""},
    {"getDeviceId", "getSubscriberId", "getNetworkOperator"},
    {"encodeToString", "decode", "encode"},
    {"findLibrary", "findResource", "findResources"},
    {"loadClass", "findClass", "loadDex"},
    {"loadDex", "loadClass", ""},
    {"findLibrary", "findResource", "findResources"},
    {"read", "", ""},
    {"write", "", ""},
    {"start", "", ""},
    {"exec", "", ""},
    {"invoke", "", ""},
    {"openConnection", "", ""},
    {"doFinal", "", ""},
    {"doFinal", "", ""},
    {"getEncoded", "getAlgorithm", "getFormat"},
    {"open", "", ""},
    {"execute", "", ""},
}};

constexpr int method_count(int category) {
    int n = 0;
    for (auto m : kCategoryMethods[static_cast<std::size_t>(category)])
        if (!m.empty()) ++n;
    return n;
}

}  // namespace

std::span<const std::string_view> api_category_names() {
    return {kCategoryNames.data(), kCategoryNames.size()};
}

std::string_view api_category_name(int category) {
    return kCategoryNames.at(static_cast<std::size_t>(category));
}

int api_category_index(std::string_view name) {
    for (int i = 0; i < kApiCategoryCount; ++i)
        if (kCategoryNames[static_cast<std::size_t>(i)] == name) return i;
    return kUnknownCategory;
}

std::span<const std::string_view> api_category_methods(int category) {
    const auto& row = kCategoryMethods.at(static_cast<std::size_t>(category));
    return {row.data(), static_cast<std::size_t>(method_count(category))};
}

int map_call_to_category(std::string_view class_name, std::string_view /*method_name*/) {
    int best = kUnknownCategory;
    std::size_t best_len = 0;
    for (int i = 0; i < kApiCategoryCount; ++i) {
        std::string_view cat = kCategoryNames[static_cast<std::size_t>(i)];
        if (cat.size() >= best_len && class_name.starts_with(cat)) {
            best = i;
            best_len = cat.size();
        }
    }
    return best;
}

std::pair<std::string, std::string> split_call_name(std::string_view full_method) {
    const auto dot = full_method.rfind('.');
    if (dot == std::string_view::npos) return {"", std::string(full_method)};
    return {std::string(full_method.substr(0, dot)), std::string(full_method.substr(dot + 1))};
}

std::string make_method_name(int category, int method_index) {
    const auto methods = api_category_methods(category);
    return std::string(api_category_name(category)) + "." +
           std::string(methods[static_cast<std::size_t>(method_index) % methods.size()]);
}

}  // namespace graftbench
